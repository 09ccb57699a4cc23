//! Derivation constructions and checks.
//!
//! Derivations are finite tables on a window basis. The two constructive
//! families are `D_phi` (multiply a degree-`a` vector by `phi(a)` for an
//! additive homomorphism `phi`) and the inner derivations `ad_z`. The graded
//! Leibniz rule
//! `D([x,y]) = [D(x), y] + (-1)^{|D||x|} [x, D(y)]`
//! is checked pairwise over a window; pairs whose bracket leaves the table
//! domain are reported as skipped rather than silently ignored.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::grading::{GroupElement, HomZ};
use crate::scalar::QuadExtScalar;
use crate::superalgebra::{
    parity_sign, Algebra, AlgebraError, BasisVector, Element, Parity, Variant, Window,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DerivationError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("image of {0:?} mixes parities or has the wrong parity for the declared one")]
    ParityViolation(BasisVector),
    #[error("image of {0:?} is not homogeneous of the declared degree shift")]
    DegreeViolation(BasisVector),
    #[error("the table domain does not cover the window (missing {0:?})")]
    DomainTooSmall(BasisVector),
    #[error("adjoint tables need a parity-homogeneous element")]
    MixedParity,
    #[error("operation requires variant SV or W, got {0}")]
    UnsupportedVariant(Variant),
}

/// A linear map given by its images on a finite set of basis vectors,
/// together with a declared parity and (optionally) a homogeneous degree
/// shift. Both declarations are validated against the images.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTable {
    images: BTreeMap<BasisVector, Element>,
    parity: Parity,
    degree: Option<GroupElement>,
}

impl DerivationTable {
    pub fn new(
        images: BTreeMap<BasisVector, Element>,
        parity: Parity,
        degree: Option<GroupElement>,
    ) -> Result<Self, DerivationError> {
        for (vector, image) in &images {
            let expected = vector.parity().add(parity);
            if image.homogeneous_parity() != Some(expected) && !image.is_zero() {
                return Err(DerivationError::ParityViolation(vector.clone()));
            }
            if let Some(shift) = &degree {
                if !image.is_zero() {
                    let expected = &vector.degree_or_zero(shift.rank()) + shift;
                    if image.homogeneous_degree(shift.rank()) != Some(expected) {
                        return Err(DerivationError::DegreeViolation(vector.clone()));
                    }
                }
            }
        }
        Ok(DerivationTable {
            images,
            parity,
            degree,
        })
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn degree(&self) -> Option<&GroupElement> {
        self.degree.as_ref()
    }

    pub fn domain(&self) -> impl Iterator<Item = &BasisVector> {
        self.images.keys()
    }

    pub fn image(&self, vector: &BasisVector) -> Option<&Element> {
        self.images.get(vector)
    }

    /// Applies the table to an element; `None` when some support vector is
    /// outside the domain.
    pub fn apply(&self, x: &Element) -> Option<Element> {
        let mut out = Element::zero(x.variant());
        for (vector, coeff) in x.terms() {
            let image = self.images.get(vector)?;
            out.add_scaled(image, coeff);
        }
        Some(out)
    }

    /// The table whose images are the degree-(`deg(x) + shift`) components
    /// of the original images. Summing the components over all occurring
    /// shifts reconstructs the table.
    pub fn degree_component(&self, shift: &GroupElement) -> DerivationTable {
        let images = self
            .images
            .iter()
            .map(|(vector, image)| {
                let target = &vector.degree_or_zero(shift.rank()) + shift;
                (vector.clone(), image.degree_component(&target))
            })
            .collect();
        DerivationTable {
            images,
            parity: self.parity,
            degree: Some(shift.clone()),
        }
    }

    /// Every degree shift that occurs with a nonzero component.
    pub fn occurring_shifts(&self, rank: usize) -> Vec<GroupElement> {
        let mut shifts = std::collections::BTreeSet::new();
        for (vector, image) in &self.images {
            let base = vector.degree_or_zero(rank);
            for d in image.degrees(rank) {
                shifts.insert(&d - &base);
            }
        }
        shifts.into_iter().collect()
    }

    /// Pointwise sum; panics on mismatched parity.
    pub fn add(&self, rhs: &DerivationTable) -> DerivationTable {
        assert_eq!(self.parity, rhs.parity, "parity mismatch");
        let mut images = self.images.clone();
        for (vector, image) in &rhs.images {
            match images.get_mut(vector) {
                Some(entry) => *entry = entry.add(image),
                None => {
                    images.insert(vector.clone(), image.clone());
                }
            }
        }
        DerivationTable {
            images,
            parity: self.parity,
            degree: None,
        }
    }
}

/// `D_phi` on a single vector: multiply by `phi(degree)`.
pub fn d_phi(algebra: &Algebra, phi: &HomZ, vector: &BasisVector) -> Result<Element, DerivationError> {
    if !algebra.variant().leveled() {
        return Err(DerivationError::UnsupportedVariant(algebra.variant()));
    }
    let degree = vector
        .degree()
        .expect("SV and W vectors always carry a degree");
    Ok(Element::single(
        algebra.variant(),
        vector.clone(),
        phi.eval(degree),
    ))
}

/// The `D_phi` table on a whole window (an even derivation of degree 0).
pub fn d_phi_table(
    algebra: &Algebra,
    phi: &HomZ,
    window: &Window,
) -> Result<DerivationTable, DerivationError> {
    let mut images = BTreeMap::new();
    for vector in algebra.window_basis(window) {
        let image = d_phi(algebra, phi, &vector)?;
        images.insert(vector, image);
    }
    DerivationTable::new(
        images,
        Parity::Even,
        Some(GroupElement::zero(algebra.rank())),
    )
}

/// The `ad_z` table on a window. `z` must be parity-homogeneous; the
/// declared degree is set when `z` is degree-homogeneous.
pub fn adjoint_table(
    algebra: &Algebra,
    z: &Element,
    window: &Window,
) -> Result<DerivationTable, DerivationError> {
    let parity = z.homogeneous_parity().ok_or(DerivationError::MixedParity)?;
    let degree = z.homogeneous_degree(algebra.rank());
    let mut images = BTreeMap::new();
    for vector in algebra.window_basis(window) {
        let single = Element::single(algebra.variant(), vector.clone(), QuadExtScalar::one());
        images.insert(vector, algebra.bracket(z, &single)?);
    }
    DerivationTable::new(images, parity, degree)
}

/// One Leibniz violation: the pair and the nonzero residual.
#[derive(Debug, Clone)]
pub struct LeibnizViolation {
    pub x: BasisVector,
    pub y: BasisVector,
    pub residual: Element,
}

#[derive(Debug, Clone)]
pub struct LeibnizReport {
    pub checked: usize,
    /// Pairs whose bracket support leaves the table domain.
    pub skipped: usize,
    pub violations: Vec<LeibnizViolation>,
}

impl LeibnizReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks `D([x,y]) = [D(x), y] + (-1)^{|D||x|} [x, D(y)]` over all ordered
/// window basis pairs. The table domain must cover the window basis.
pub fn leibniz_check(
    algebra: &Algebra,
    table: &DerivationTable,
    window: &Window,
) -> Result<LeibnizReport, DerivationError> {
    let basis = algebra.window_basis(window);
    for vector in &basis {
        if table.image(vector).is_none() {
            return Err(DerivationError::DomainTooSmall(vector.clone()));
        }
    }
    let mut report = LeibnizReport {
        checked: 0,
        skipped: 0,
        violations: Vec::new(),
    };
    let singles: Vec<Element> = basis
        .iter()
        .map(|b| Element::single(algebra.variant(), b.clone(), QuadExtScalar::one()))
        .collect();
    for (i, x) in basis.iter().enumerate() {
        let dx = table.image(x).expect("domain covers window");
        let d_sign = parity_sign(table.parity(), x.parity());
        for (j, y) in basis.iter().enumerate() {
            let bracket = algebra.bracket_basis(x, y);
            let Some(d_bracket) = table.apply(&bracket) else {
                report.skipped += 1;
                continue;
            };
            let dy = table.image(y).expect("domain covers window");
            let left = algebra.bracket(dx, &singles[j])?;
            let right = algebra.bracket(&singles[i], dy)?;
            let mut residual = d_bracket;
            residual.merge_owned(left, true);
            residual.merge_owned(right, d_sign == 1);
            report.checked += 1;
            if !residual.is_zero() {
                report.violations.push(LeibnizViolation {
                    x: x.clone(),
                    y: y.clone(),
                    residual,
                });
            }
        }
    }
    Ok(report)
}

/// Solves `[y, L(0,0)] = v` for a finitely supported `y`.
///
/// Writing `v = sum a_{a,j} X(a,j)` (X either kind), the unknown
/// coefficients satisfy `a*b_{a,j} + (j+1)*b_{a,j+1} = -a_{a,j}`. For
/// `a = 0` this is the upward recursion `b_{0,j+1} = -a_{0,j}/(j+1)`
/// (with `b_{0,0} = 0`); for `a != 0` the same relation is solved downward
/// from the top level of the support with the tail set to zero, which is
/// the unique finitely supported solution.
pub fn adjust_inner(algebra: &Algebra, v: &Element) -> Result<Element, DerivationError> {
    if !algebra.variant().leveled() {
        return Err(DerivationError::UnsupportedVariant(algebra.variant()));
    }
    if v.variant() != algebra.variant() {
        return Err(DerivationError::Algebra(AlgebraError::VariantMismatch {
            expected: algebra.variant(),
            got: v.variant(),
        }));
    }

    // group the coefficients by (kind, degree)
    type Key = (crate::superalgebra::BasisKind, GroupElement);
    let mut by_degree: BTreeMap<Key, BTreeMap<u32, QuadExtScalar>> = BTreeMap::new();
    for (vector, coeff) in v.terms() {
        let key = (vector.kind(), vector.degree().unwrap().clone());
        by_degree
            .entry(key)
            .or_default()
            .insert(vector.level().unwrap(), coeff.clone());
    }

    let mut y = Element::zero(algebra.variant());
    for ((kind, degree), levels) in by_degree {
        let alpha = algebra.group().evaluate(&degree);
        let make = |level: u32| -> BasisVector {
            match kind {
                crate::superalgebra::BasisKind::L => BasisVector::L {
                    degree: degree.clone(),
                    level,
                },
                crate::superalgebra::BasisKind::G => BasisVector::G {
                    degree: degree.clone(),
                    level,
                },
                crate::superalgebra::BasisKind::C => unreachable!("no C in SV or W"),
            }
        };
        let top = *levels.keys().next_back().expect("nonempty level map");
        if alpha.is_zero() {
            // b_{0,j+1} = -a_{0,j} / (j+1)
            for (j, a) in &levels {
                let b = -&(a.checked_div(&QuadExtScalar::from_int(*j as i64 + 1))
                    .expect("level + 1 is nonzero"));
                y.add_term(make(j + 1), b);
            }
        } else {
            // downward: b_{a,j} = (-a_{a,j} - (j+1) b_{a,j+1}) / a
            let mut next = QuadExtScalar::zero();
            let mut j = top;
            loop {
                let a = levels.get(&j).cloned().unwrap_or_else(QuadExtScalar::zero);
                let numer = &(-&a) - &next.scale_int(j as i64 + 1);
                let b = numer.checked_div(&alpha).expect("alpha is nonzero");
                y.add_term(make(j), b.clone());
                if j == 0 {
                    break;
                }
                next = b;
                j -= 1;
            }
        }
    }
    Ok(y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grading::IndexGroup;
    use crate::superalgebra::BasisKind;

    fn q(p: i64, den: i64) -> QuadExtScalar {
        QuadExtScalar::rational(p, den)
    }

    fn sv() -> Algebra {
        let group = IndexGroup::new(2, &[q(1, 1)], q(1, 2)).unwrap();
        Algebra::new(Variant::SV, group)
    }

    /// s = 0 session where degree-0 odd vectors exist.
    fn sv_s0() -> Algebra {
        let group = IndexGroup::new(2, &[q(1, 1)], q(0, 1)).unwrap();
        Algebra::new(Variant::SV, group)
    }

    fn l(alg: &Algebra, a: i64, i: u32) -> BasisVector {
        let coords = alg
            .group()
            .member(&q(a, 1), crate::grading::Coset::Gamma)
            .unwrap();
        alg.l(coords, i).unwrap()
    }

    fn g_half(alg: &Algebra, h: i64, i: u32) -> BasisVector {
        let value = q(h, 2);
        let coords = alg
            .group()
            .member(&value, crate::grading::Coset::SPlusGamma)
            .unwrap();
        alg.g(coords, i).unwrap()
    }

    fn single(alg: &Algebra, v: BasisVector) -> Element {
        Element::single(alg.variant(), v, QuadExtScalar::one())
    }

    fn l_zero_zero(alg: &Algebra) -> Element {
        single(alg, alg.l(GroupElement::zero(alg.rank()), 0).unwrap())
    }

    #[test]
    fn d_phi_scales_by_the_degree_value() {
        let alg = sv();
        let phi0 = HomZ::identity(alg.group());
        let x = l(&alg, 2, 3);
        assert_eq!(
            d_phi(&alg, &phi0, &x).unwrap(),
            Element::single(Variant::SV, x, q(2, 1))
        );
        let zero = HomZ::zero(alg.group());
        assert!(d_phi(&alg, &zero, &l(&alg, 1, 0)).unwrap().is_zero());
    }

    #[test]
    fn d_phi_table_satisfies_leibniz() {
        let alg = sv();
        let window = Window::from_coord_bound(alg.group(), 2, 2);
        let phi = HomZ::new(alg.group(), vec![q(3, 1)]).unwrap();
        let table = d_phi_table(&alg, &phi, &window).unwrap();
        let report = leibniz_check(&alg, &table, &window).unwrap();
        assert!(report.passed());
        assert!(report.checked > 0);
    }

    #[test]
    fn odd_adjoint_table_satisfies_leibniz() {
        let alg = sv();
        let window = Window::from_coord_bound(alg.group(), 2, 2);
        let z = single(&alg, g_half(&alg, 1, 0));
        let table = adjoint_table(&alg, &z, &window).unwrap();
        assert_eq!(table.parity(), Parity::Odd);
        let report = leibniz_check(&alg, &table, &window).unwrap();
        assert!(report.passed());
        assert!(report.checked > 0);
        assert!(report.skipped > 0, "boundary pairs should be skipped");
    }

    #[test]
    fn a_non_derivation_is_caught() {
        let alg = sv();
        let window = Window::from_coord_bound(alg.group(), 1, 1);
        // map L(0,0) to L(1,0) and everything else to zero
        let mut images: BTreeMap<BasisVector, Element> = alg
            .window_basis(&window)
            .into_iter()
            .map(|b| (b, Element::zero(Variant::SV)))
            .collect();
        images.insert(
            alg.l(GroupElement::zero(1), 0).unwrap(),
            single(&alg, l(&alg, 1, 0)),
        );
        let table = DerivationTable::new(images, Parity::Even, None).unwrap();
        let report = leibniz_check(&alg, &table, &window).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn degree_components_decompose_and_reassemble() {
        let alg = sv();
        let window = Window::from_coord_bound(alg.group(), 1, 1);
        // D(L(0,0)) = L(1,0) + L(0,1), other images zero
        let mut images: BTreeMap<BasisVector, Element> = alg
            .window_basis(&window)
            .into_iter()
            .map(|b| (b, Element::zero(Variant::SV)))
            .collect();
        let mut image = single(&alg, l(&alg, 1, 0));
        image.add_term(alg.l(GroupElement::zero(1), 1).unwrap(), q(1, 1));
        images.insert(alg.l(GroupElement::zero(1), 0).unwrap(), image);
        let table = DerivationTable::new(images, Parity::Even, None).unwrap();

        // shift by the coordinates of 1 picks out the L(1,0) part
        let one_shift = alg
            .group()
            .member(&q(1, 1), crate::grading::Coset::Gamma)
            .unwrap();
        let comp = table.degree_component(&one_shift);
        assert_eq!(
            comp.image(&alg.l(GroupElement::zero(1), 0).unwrap()).unwrap(),
            &single(&alg, l(&alg, 1, 0))
        );

        // a shift that never occurs gives the zero table
        let far = alg
            .group()
            .member(&q(7, 1), crate::grading::Coset::Gamma)
            .unwrap();
        let zero_comp = table.degree_component(&far);
        assert!(zero_comp
            .image(&alg.l(GroupElement::zero(1), 0).unwrap())
            .unwrap()
            .is_zero());

        // summing all occurring components reconstructs the table
        let shifts = table.occurring_shifts(alg.rank());
        let mut sum: Option<DerivationTable> = None;
        for shift in &shifts {
            let piece = table.degree_component(shift);
            sum = Some(match sum {
                None => piece,
                Some(acc) => acc.add(&piece),
            });
        }
        let sum = sum.unwrap();
        for b in table.domain() {
            assert_eq!(sum.image(b), table.image(b));
        }
    }

    #[test]
    fn adjust_inner_oracle_cases() {
        let alg = sv_s0();
        let zero = GroupElement::zero(1);

        // v = L(0,1) -> y = -(1/2) L(0,2)
        let v = single(&alg, alg.l(zero.clone(), 1).unwrap());
        let y = adjust_inner(&alg, &v).unwrap();
        assert_eq!(
            y,
            Element::single(Variant::SV, alg.l(zero.clone(), 2).unwrap(), q(-1, 2))
        );
        assert_eq!(alg.bracket(&y, &l_zero_zero(&alg)).unwrap(), v);

        // v = L(1,0) -> y = -L(1,0)
        let v = single(&alg, l(&alg, 1, 0));
        let y = adjust_inner(&alg, &v).unwrap();
        assert_eq!(y, Element::single(Variant::SV, l(&alg, 1, 0), q(-1, 1)));
        assert_eq!(alg.bracket(&y, &l_zero_zero(&alg)).unwrap(), v);

        // v = G(0,0) -> y = -G(0,1)
        let v = single(&alg, alg.g(zero.clone(), 0).unwrap());
        let y = adjust_inner(&alg, &v).unwrap();
        assert_eq!(
            y,
            Element::single(Variant::SV, alg.g(zero.clone(), 1).unwrap(), q(-1, 1))
        );
        assert_eq!(alg.bracket(&y, &l_zero_zero(&alg)).unwrap(), v);
    }

    #[test]
    fn adjust_inner_handles_mixed_support() {
        let alg = sv();
        let mut v = single(&alg, l(&alg, 2, 3));
        v.add_term(l(&alg, 2, 1), q(5, 3));
        v.add_term(g_half(&alg, -3, 2), q(-7, 2));
        v.add_term(alg.l(GroupElement::zero(1), 2).unwrap(), q(1, 1));
        let y = adjust_inner(&alg, &v).unwrap();
        assert_eq!(alg.bracket(&y, &l_zero_zero(&alg)).unwrap(), v);
    }

    #[test]
    fn table_validation_rejects_bad_declarations() {
        let alg = sv();
        let x = l(&alg, 1, 0);
        // declared odd but the image of an even vector is even
        let images = BTreeMap::from([(x.clone(), single(&alg, l(&alg, 2, 0)))]);
        assert!(matches!(
            DerivationTable::new(images, Parity::Odd, None),
            Err(DerivationError::ParityViolation(_))
        ));
        // declared degree shift 0 but the image shifts by 1
        let images = BTreeMap::from([(x.clone(), single(&alg, l(&alg, 2, 0)))]);
        assert!(matches!(
            DerivationTable::new(images, Parity::Even, Some(GroupElement::zero(1))),
            Err(DerivationError::DegreeViolation(_))
        ));
    }

    #[test]
    fn vanishing_on_generators_propagates_along_the_span() {
        // No nonzero single-vector perturbation at a reachable non-generator
        // vector extends the zero map on the generators to a Leibniz table.
        let alg = sv();
        let window = Window::from_coord_bound(alg.group(), 1, 2);
        let report = alg.generate_span(&window).unwrap();
        let basis = alg.window_basis(&window);
        let generators: Vec<BasisVector> = basis
            .iter()
            .filter(|b| {
                b.level() == Some(0)
                    || (b.kind() == BasisKind::L
                        && b.level() == Some(1)
                        && b.degree().unwrap().is_zero())
            })
            .cloned()
            .collect();
        let one_shift = alg
            .group()
            .member(&q(1, 1), crate::grading::Coset::Gamma)
            .unwrap();
        for target in report.reached.iter().filter(|b| !generators.contains(b)) {
            // perturbation of homogeneous degree shift 1
            let image_degree = &target.degree_or_zero(1) + &one_shift;
            let perturbed = match target.kind() {
                BasisKind::L => alg.l(image_degree, target.level().unwrap()),
                BasisKind::G => alg.g(image_degree, target.level().unwrap()),
                BasisKind::C => continue,
            };
            let Ok(perturbed) = perturbed else { continue };
            let mut images: BTreeMap<BasisVector, Element> = basis
                .iter()
                .map(|b| (b.clone(), Element::zero(Variant::SV)))
                .collect();
            images.insert(target.clone(), single(&alg, perturbed));
            let table = DerivationTable::new(images, Parity::Even, Some(one_shift.clone()))
                .unwrap();
            let report = leibniz_check(&alg, &table, &window).unwrap();
            assert!(
                !report.passed(),
                "a nonzero table vanishing on the generators slipped through at {target:?}"
            );
        }
    }
}
