//! 2-cocycles, 2-coboundaries, and the constructive trivialization.
//!
//! A 2-cocycle is a bilinear form with super skew-symmetry
//! `psi(x,y) = -(-1)^{|x||y|} psi(y,x)` and the cocycle identity
//! `psi(x,[y,z]) = psi([x,y],z) + (-1)^{|x||y|} psi(y,[x,z])`.
//! Every linear functional `g` yields the coboundary `psi_g(x,y) = g([x,y])`.
//!
//! Given any cocycle `psi` on the leveled superalgebra, the functional `f`
//! defined level by level as
//!
//! `f(L(0,i)) = psi(L(0,0), L(0,i+1)) / (i+1)`
//! `f(L(a,i)) = (psi(L(0,0), L(a,i)) - i f(L(a,i-1))) / a`        (a != 0)
//! `f(G(0,i)) = 2/(2i-1) * psi(L(0,1), G(0,i))`
//! `f(G(a,i)) = (psi(L(0,0), G(a,i)) - i f(G(a,i-1))) / a`        (a != 0)
//!
//! trivializes it: the residual `phi = psi - psi_f` vanishes on all three
//! sectors (L,L), (L,G), (G,G). The residual check verifies this window by
//! window, which is the checkable content of the second cohomology group
//! being trivial.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::grading::GroupElement;
use crate::scalar::{QuadExtScalar, ScalarError};
use crate::superalgebra::{
    parity_sign, Algebra, AlgebraError, BasisKind, BasisVector, Element, Variant, Window,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("cocycle table has no entry window containing the pair ({x:?}, {y:?})")]
    OutOfWindow { x: BasisVector, y: BasisVector },
    #[error("functional is undefined on {vector:?}")]
    FunctionalUndefined { vector: BasisVector },
    #[error("conflicting table entries for the pair ({x:?}, {y:?})")]
    ConflictingEntry { x: BasisVector, y: BasisVector },
    #[error("diagonal entry on the even vector {0:?} must vanish by skew symmetry")]
    NonzeroEvenDiagonal(BasisVector),
    #[error("operation requires variant {needed}, got {got}")]
    RequiresVariant { needed: Variant, got: Variant },
}

/// Where a functional is defined: everywhere (zero off the stored support)
/// or only on an explicit basis set.
#[derive(Debug, Clone, PartialEq, Eq)]
enum FunctionalDomain {
    Total,
    Restricted(BTreeSet<BasisVector>),
}

/// A linear functional on the algebra, finitely supported.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFunctional {
    values: BTreeMap<BasisVector, QuadExtScalar>,
    domain: FunctionalDomain,
}

impl LinearFunctional {
    /// Total functional: zero outside the stored support.
    pub fn new(values: impl IntoIterator<Item = (BasisVector, QuadExtScalar)>) -> Self {
        LinearFunctional {
            values: values.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
            domain: FunctionalDomain::Total,
        }
    }

    pub fn zero() -> Self {
        LinearFunctional::new([])
    }

    /// Functional defined only on `domain` (zero there unless stored).
    pub fn restricted(
        values: impl IntoIterator<Item = (BasisVector, QuadExtScalar)>,
        domain: BTreeSet<BasisVector>,
    ) -> Self {
        LinearFunctional {
            values: values
                .into_iter()
                .filter(|(v, c)| !c.is_zero() && domain.contains(v))
                .collect(),
            domain: FunctionalDomain::Restricted(domain),
        }
    }

    pub fn support(&self) -> impl Iterator<Item = (&BasisVector, &QuadExtScalar)> {
        self.values.iter()
    }

    pub fn is_defined_on(&self, vector: &BasisVector) -> bool {
        match &self.domain {
            FunctionalDomain::Total => true,
            FunctionalDomain::Restricted(dom) => dom.contains(vector),
        }
    }

    pub fn eval_basis(&self, vector: &BasisVector) -> Result<QuadExtScalar, CohomologyError> {
        if !self.is_defined_on(vector) {
            return Err(CohomologyError::FunctionalUndefined {
                vector: vector.clone(),
            });
        }
        Ok(self
            .values
            .get(vector)
            .cloned()
            .unwrap_or_else(QuadExtScalar::zero))
    }

    /// Linear extension to elements; fails loudly when some support vector
    /// is outside the domain.
    pub fn eval(&self, x: &Element) -> Result<QuadExtScalar, CohomologyError> {
        let mut acc = QuadExtScalar::zero();
        for (vector, coeff) in x.terms() {
            acc = &acc + &(&self.eval_basis(vector)? * coeff);
        }
        Ok(acc)
    }

    /// Pointwise perturbation `f + c * delta_vector` (domain unchanged; the
    /// vector must already be in it).
    pub fn perturbed(&self, vector: &BasisVector, delta: &QuadExtScalar) -> LinearFunctional {
        let mut out = self.clone();
        let entry = out
            .values
            .entry(vector.clone())
            .or_insert_with(QuadExtScalar::zero);
        *entry = &*entry + delta;
        if entry.is_zero() {
            out.values.remove(vector);
        }
        out
    }
}

/// A finitely presented cocycle on ordered basis pairs inside a window,
/// extended by super skew-symmetry; only one orientation is stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CocycleTable {
    domain: BTreeSet<BasisVector>,
    entries: BTreeMap<(BasisVector, BasisVector), QuadExtScalar>,
}

impl CocycleTable {
    pub fn new(
        domain: BTreeSet<BasisVector>,
        raw_entries: impl IntoIterator<Item = (BasisVector, BasisVector, QuadExtScalar)>,
    ) -> Result<Self, CohomologyError> {
        let mut entries: BTreeMap<(BasisVector, BasisVector), QuadExtScalar> = BTreeMap::new();
        for (x, y, value) in raw_entries {
            if !domain.contains(&x) {
                return Err(CohomologyError::OutOfWindow { x: x.clone(), y });
            }
            if !domain.contains(&y) {
                return Err(CohomologyError::OutOfWindow { x, y: y.clone() });
            }
            if x == y && parity_sign(x.parity(), y.parity()) == 1 {
                if !value.is_zero() {
                    return Err(CohomologyError::NonzeroEvenDiagonal(x));
                }
                continue;
            }
            // canonicalize to x <= y, adjusting by the skew sign
            let (kx, ky, canonical) = if x <= y {
                (x, y, value)
            } else {
                let sign = parity_sign(x.parity(), y.parity());
                let flipped = if sign == 1 { -&value } else { value };
                (y, x, flipped)
            };
            if canonical.is_zero() {
                continue;
            }
            match entries.get(&(kx.clone(), ky.clone())) {
                Some(existing) if *existing != canonical => {
                    return Err(CohomologyError::ConflictingEntry { x: kx, y: ky });
                }
                Some(_) => {}
                None => {
                    entries.insert((kx, ky), canonical);
                }
            }
        }
        Ok(CocycleTable { domain, entries })
    }

    pub fn domain(&self) -> &BTreeSet<BasisVector> {
        &self.domain
    }

    pub fn entries(
        &self,
    ) -> impl Iterator<Item = (&(BasisVector, BasisVector), &QuadExtScalar)> {
        self.entries.iter()
    }

    fn eval_pair(
        &self,
        x: &BasisVector,
        y: &BasisVector,
    ) -> Result<QuadExtScalar, CohomologyError> {
        if !self.domain.contains(x) || !self.domain.contains(y) {
            return Err(CohomologyError::OutOfWindow {
                x: x.clone(),
                y: y.clone(),
            });
        }
        if x <= y {
            Ok(self
                .entries
                .get(&(x.clone(), y.clone()))
                .cloned()
                .unwrap_or_else(QuadExtScalar::zero))
        } else {
            let stored = self
                .entries
                .get(&(y.clone(), x.clone()))
                .cloned()
                .unwrap_or_else(QuadExtScalar::zero);
            // psi(x,y) = -(-1)^{|x||y|} psi(y,x)
            Ok(if parity_sign(x.parity(), y.parity()) == 1 {
                -&stored
            } else {
                stored
            })
        }
    }
}

/// A 2-cocycle presented either as a coboundary `psi_g` or as an explicit
/// skew table on a window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CocycleSpec {
    Coboundary(LinearFunctional),
    Table(CocycleTable),
}

impl CocycleSpec {
    /// Evaluation on a basis pair.
    pub fn eval_pair(
        &self,
        algebra: &Algebra,
        x: &BasisVector,
        y: &BasisVector,
    ) -> Result<QuadExtScalar, CohomologyError> {
        match self {
            CocycleSpec::Coboundary(g) => g.eval(&algebra.bracket_basis(x, y)),
            CocycleSpec::Table(table) => table.eval_pair(x, y),
        }
    }

    /// Evaluation on a basis pair whose bracket the caller already holds;
    /// coboundaries apply their functional to it directly.
    fn eval_pair_using(
        &self,
        x: &BasisVector,
        y: &BasisVector,
        bracket: &Element,
    ) -> Result<QuadExtScalar, CohomologyError> {
        match self {
            CocycleSpec::Coboundary(g) => g.eval(bracket),
            CocycleSpec::Table(table) => table.eval_pair(x, y),
        }
    }

    /// Bilinear evaluation on elements.
    pub fn eval(
        &self,
        algebra: &Algebra,
        x: &Element,
        y: &Element,
    ) -> Result<QuadExtScalar, CohomologyError> {
        let mut acc = QuadExtScalar::zero();
        for (vx, cx) in x.terms() {
            for (vy, cy) in y.terms() {
                let factor = cx * cy;
                acc = &acc + &(&self.eval_pair(algebra, vx, vy)? * &factor);
            }
        }
        Ok(acc)
    }

    fn eval_basis_element(
        &self,
        algebra: &Algebra,
        x: &BasisVector,
        y: &Element,
    ) -> Result<QuadExtScalar, CohomologyError> {
        let mut acc = QuadExtScalar::zero();
        for (vy, cy) in y.terms() {
            acc = &acc + &(&self.eval_pair(algebra, x, vy)? * cy);
        }
        Ok(acc)
    }

    fn eval_element_basis(
        &self,
        algebra: &Algebra,
        x: &Element,
        y: &BasisVector,
    ) -> Result<QuadExtScalar, CohomologyError> {
        let mut acc = QuadExtScalar::zero();
        for (vx, cx) in x.terms() {
            acc = &acc + &(&self.eval_pair(algebra, vx, y)? * cx);
        }
        Ok(acc)
    }
}

#[derive(Debug, Clone)]
pub enum CocycleViolation {
    Skew {
        x: BasisVector,
        y: BasisVector,
        residual: QuadExtScalar,
    },
    Jacobi {
        x: BasisVector,
        y: BasisVector,
        z: BasisVector,
        residual: QuadExtScalar,
    },
}

#[derive(Debug, Clone)]
pub struct CocycleReport {
    pub checked_pairs: usize,
    pub checked_triples: usize,
    /// Pairs or triples whose evaluations leave the table window.
    pub skipped: usize,
    pub violations: Vec<CocycleViolation>,
}

impl CocycleReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks skew super-symmetry on window pairs and the cocycle identity on
/// window triples, skipping (and counting) those whose evaluations leave
/// the presentation window.
pub fn is_cocycle(
    psi: &CocycleSpec,
    algebra: &Algebra,
    window: &Window,
) -> Result<CocycleReport, CohomologyError> {
    let basis = algebra.window_basis(window);
    let mut report = CocycleReport {
        checked_pairs: 0,
        checked_triples: 0,
        skipped: 0,
        violations: Vec::new(),
    };
    for x in &basis {
        for y in &basis {
            let fwd = match psi.eval_pair(algebra, x, y) {
                Ok(v) => v,
                Err(CohomologyError::OutOfWindow { .. }) => {
                    report.skipped += 1;
                    continue;
                }
                Err(e) => return Err(e),
            };
            let bwd = psi.eval_pair(algebra, y, x)?;
            let residual = if parity_sign(x.parity(), y.parity()) == 1 {
                &fwd + &bwd
            } else {
                &fwd - &bwd
            };
            report.checked_pairs += 1;
            if !residual.is_zero() {
                report.violations.push(CocycleViolation::Skew {
                    x: x.clone(),
                    y: y.clone(),
                    residual,
                });
            }
        }
    }
    for x in &basis {
        for y in &basis {
            let xy = algebra.bracket_basis(x, y);
            for z in &basis {
                let yz = algebra.bracket_basis(y, z);
                let xz = algebra.bracket_basis(x, z);
                let lhs = psi.eval_basis_element(algebra, x, &yz);
                let first = psi.eval_element_basis(algebra, &xy, z);
                let second = psi.eval_basis_element(algebra, y, &xz);
                let (lhs, first, second) = match (lhs, first, second) {
                    (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                    (Err(CohomologyError::OutOfWindow { .. }), _, _)
                    | (_, Err(CohomologyError::OutOfWindow { .. }), _)
                    | (_, _, Err(CohomologyError::OutOfWindow { .. })) => {
                        report.skipped += 1;
                        continue;
                    }
                    (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => return Err(e),
                };
                let signed = if parity_sign(x.parity(), y.parity()) == 1 {
                    second
                } else {
                    -&second
                };
                let residual = &(&lhs - &first) - &signed;
                report.checked_triples += 1;
                if !residual.is_zero() {
                    report.violations.push(CocycleViolation::Jacobi {
                        x: x.clone(),
                        y: y.clone(),
                        z: z.clone(),
                        residual,
                    });
                }
            }
        }
    }
    Ok(report)
}

/// Computes the trivializing functional on the given basis vectors (levels
/// below a target are filled in as needed). Requires the leveled
/// superalgebra variant.
pub fn trivialize(
    psi: &CocycleSpec,
    algebra: &Algebra,
    targets: &[BasisVector],
) -> Result<LinearFunctional, CohomologyError> {
    if algebra.variant() != Variant::SV {
        return Err(CohomologyError::RequiresVariant {
            needed: Variant::SV,
            got: algebra.variant(),
        });
    }
    let rank = algebra.rank();
    let zero_deg = GroupElement::zero(rank);
    let l00 = algebra.l(zero_deg.clone(), 0)?;
    let l01 = algebra.l(zero_deg, 1)?;

    let mut memo: BTreeMap<BasisVector, QuadExtScalar> = BTreeMap::new();
    let mut sorted: Vec<BasisVector> = targets.to_vec();
    sorted.sort_by_key(|v| v.level());

    for target in &sorted {
        compute_f(psi, algebra, &l00, &l01, target, &mut memo)?;
    }
    let domain: BTreeSet<BasisVector> = memo.keys().cloned().collect();
    Ok(LinearFunctional::restricted(memo, domain))
}

fn compute_f(
    psi: &CocycleSpec,
    algebra: &Algebra,
    l00: &BasisVector,
    l01: &BasisVector,
    target: &BasisVector,
    memo: &mut BTreeMap<BasisVector, QuadExtScalar>,
) -> Result<QuadExtScalar, CohomologyError> {
    if let Some(v) = memo.get(target) {
        return Ok(v.clone());
    }
    let degree = target.degree().expect("SV vectors carry degrees").clone();
    let level = target.level().expect("SV vectors carry levels");
    let alpha = algebra.group().evaluate(&degree);
    let value = match target.kind() {
        BasisKind::L if alpha.is_zero() => {
            // f(L(0,i)) = psi(L(0,0), L(0,i+1)) / (i+1)
            let above = algebra.l(degree.clone(), level + 1)?;
            psi.eval_pair(algebra, l00, &above)?
                .checked_div(&QuadExtScalar::from_int(level as i64 + 1))?
        }
        BasisKind::L => {
            // f(L(a,i)) = (psi(L(0,0), L(a,i)) - i f(L(a,i-1))) / a
            let head = psi.eval_pair(algebra, l00, target)?;
            let tail = if level > 0 {
                let below = algebra.l(degree.clone(), level - 1)?;
                compute_f(psi, algebra, l00, l01, &below, memo)?.scale_int(level as i64)
            } else {
                QuadExtScalar::zero()
            };
            (&head - &tail).checked_div(&alpha)?
        }
        BasisKind::G if alpha.is_zero() => {
            // f(G(0,i)) = 2/(2i-1) psi(L(0,1), G(0,i)); 2i-1 is never zero
            let head = psi.eval_pair(algebra, l01, target)?;
            head.scale_int(2)
                .checked_div(&QuadExtScalar::from_int(2 * level as i64 - 1))?
        }
        BasisKind::G => {
            let head = psi.eval_pair(algebra, l00, target)?;
            let tail = if level > 0 {
                let below = algebra.g(degree.clone(), level - 1)?;
                compute_f(psi, algebra, l00, l01, &below, memo)?.scale_int(level as i64)
            } else {
                QuadExtScalar::zero()
            };
            (&head - &tail).checked_div(&alpha)?
        }
        BasisKind::C => unreachable!("no central vector in SV"),
    };
    memo.insert(target.clone(), value.clone());
    Ok(value)
}

/// Residual violations of one sector.
#[derive(Debug, Clone, Default)]
pub struct SectorReport {
    pub checked: usize,
    pub violations: Vec<(BasisVector, BasisVector, QuadExtScalar)>,
}

impl SectorReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// `phi = psi - psi_f` over all ordered window basis pairs, split into the
/// three sectors.
#[derive(Debug, Clone, Default)]
pub struct ResidualReport {
    pub ll: SectorReport,
    pub lg: SectorReport,
    pub gg: SectorReport,
}

impl ResidualReport {
    pub fn passed(&self) -> bool {
        self.ll.passed() && self.lg.passed() && self.gg.passed()
    }
}

/// Computes `phi(x,y) = psi(x,y) - f([x,y])` for every ordered window basis
/// pair. `f` must be defined on every bracket support vector that arises;
/// anything else is an error, never a silent zero.
pub fn residual_check(
    psi: &CocycleSpec,
    f: &LinearFunctional,
    algebra: &Algebra,
    window: &Window,
) -> Result<ResidualReport, CohomologyError> {
    let basis = algebra.window_basis(window);
    let mut report = ResidualReport::default();
    for x in &basis {
        for y in &basis {
            let bracket = algebra.bracket_basis(x, y);
            let phi = &psi.eval_pair_using(x, y, &bracket)? - &f.eval(&bracket)?;
            let sector = match (x.kind().min(y.kind()), x.kind().max(y.kind())) {
                (BasisKind::L, BasisKind::L) => &mut report.ll,
                (BasisKind::L, BasisKind::G) => &mut report.lg,
                (BasisKind::G, BasisKind::G) => &mut report.gg,
                other => unreachable!("no central vectors here: {other:?}"),
            };
            sector.checked += 1;
            if !phi.is_zero() {
                sector
                    .violations
                    .push((x.clone(), y.clone(), phi));
            }
        }
    }
    Ok(report)
}

/// The classical central-extension cocycle on the centerless algebra:
/// `psi(L(a), L(-a)) = (a^3 - a)/12`, `psi(L, G) = 0`,
/// `psi(G(m), G(-m)) = (m^2 - 1/4)/3`, presented as a table on the window.
pub fn svir_central_cocycle(
    algebra: &Algebra,
    window: &Window,
) -> Result<CocycleSpec, CohomologyError> {
    if algebra.variant() != Variant::SVir0 {
        return Err(CohomologyError::RequiresVariant {
            needed: Variant::SVir0,
            got: algebra.variant(),
        });
    }
    let basis = algebra.window_basis(window);
    let domain: BTreeSet<BasisVector> = basis.iter().cloned().collect();
    let mut raw = Vec::new();
    for vector in &basis {
        let degree = vector.degree().expect("no central vector in SVir0");
        let negated = -degree;
        let value = algebra.group().evaluate(degree);
        match vector.kind() {
            BasisKind::L => {
                let partner = BasisVector::L {
                    degree: negated,
                    level: 0,
                };
                if domain.contains(&partner) {
                    let cubed = value.pow(3)?;
                    let coeff = &(&cubed - &value) * &QuadExtScalar::rational(1, 12);
                    raw.push((vector.clone(), partner, coeff));
                }
            }
            BasisKind::G => {
                let partner = BasisVector::G {
                    degree: negated,
                    level: 0,
                };
                if domain.contains(&partner) {
                    // sign opposite to the even sector, matching the bracket
                    let coeff = &(&QuadExtScalar::rational(1, 4) - &(&value * &value))
                        * &QuadExtScalar::rational(1, 3);
                    raw.push((vector.clone(), partner, coeff));
                }
            }
            BasisKind::C => unreachable!("no central vector in SVir0"),
        }
    }
    Ok(CocycleSpec::Table(CocycleTable::new(domain, raw)?))
}
