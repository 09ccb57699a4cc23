use std::time::Instant;
use svir_core::derivations::{adjoint_table, leibniz_check};
use svir_core::grading::IndexGroup;
use svir_core::scalar::QuadExtScalar;
use svir_core::superalgebra::{Algebra, BasisKind, Element, Variant, Window};

fn main() {
    let q = |p: i64, d: i64| QuadExtScalar::rational(p, d);
    let sqrt2 = QuadExtScalar::sqrt_d(2).unwrap();
    let group = IndexGroup::new(2, &[q(1, 1), sqrt2.clone()], q(1, 2)).unwrap();
    let alg = Algebra::new(Variant::SV, group);
    let window = Window::from_coord_bound(alg.group(), 2, 4);
    let basis = alg.window_basis(&window);

    let l_pool: Vec<_> = basis.iter().filter(|b| b.kind() == BasisKind::L).cloned().collect();
    let mut z = Element::zero(Variant::SV);
    for k in 0..3 {
        z = z.add(&Element::single(Variant::SV, l_pool[k * 7].clone(), q(2*k as i64+1, 3)));
    }
    let table = adjoint_table(&alg, &z, &window).unwrap();

    // singles
    let singles: Vec<Element> = basis.iter()
        .map(|b| Element::single(Variant::SV, b.clone(), QuadExtScalar::one())).collect();

    // stage 1: brackets + apply
    let t = Instant::now();
    let mut kept = Vec::new();
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate() {
            let br = alg.bracket_basis(x, y);
            if let Some(db) = table.apply(&br) {
                kept.push((i, j, db));
            }
        }
    }
    println!("stage bracket+apply: {:?} ({} kept)", t.elapsed(), kept.len());

    // stage 2: left brackets [D(x), y]
    let t = Instant::now();
    let mut acc = 0usize;
    for (i, j, _) in &kept {
        let dx = table.image(&basis[*i]).unwrap();
        let left = alg.bracket(dx, &singles[*j]).unwrap();
        acc += left.len();
    }
    println!("stage left bracket: {:?} (terms {acc})", t.elapsed());

    // stage 3: right brackets [x, D(y)]
    let t = Instant::now();
    let mut acc = 0usize;
    for (i, j, _) in &kept {
        let dy = table.image(&basis[*j]).unwrap();
        let right = alg.bracket(&singles[*i], dy).unwrap();
        acc += right.len();
    }
    println!("stage right bracket: {:?} (terms {acc})", t.elapsed());

    let t = Instant::now();
    let rep = leibniz_check(&alg, &table, &window).unwrap();
    println!("full leibniz ad_z: {:?} (checked {})", t.elapsed(), rep.checked);
}
