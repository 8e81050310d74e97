//! Special fibers of the minimal regular model of X₀(p) at places above p.
//!
//! The dual graph has two extremal components C₀ and C∞ joined by s = g+1
//! branches, one per supersingular point. A branch of width w ∈ {1,2,3}
//! (half the automorphism count of the supersingular point) passes through
//! w·e − 1 interior components, where e is the ramification index of the
//! place. The Eichler mass formula Σ 1/wₙ = (p−1)/12 pins the branch counts.
//!
//! Intersection numbers are stored in units of log #k(v): the factor
//! f_v·log p is applied only at report time, so everything here is an exact
//! rational or integer.

use crate::linalg::{det_bigint, QMat};
use crate::rat::{self, q_int, Q};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FiberError {
    #[error("p = {0} is not prime")]
    NonPrime(u64),
    #[error("p = {0} is too small (primes are taken > 17)")]
    PTooSmall(u64),
    #[error("Eichler mass did not produce an integral branch count at p = {0}")]
    NonIntegralMass(u64),
    #[error("component out of range: branch {branch}, position {m}")]
    ComponentOutOfRange { branch: usize, m: usize },
    #[error("invalid branch permutation: {0}")]
    InvalidPermutation(String),
}

/// Parameters of a place v above p: ramification index e and residual
/// degree f, so that #k(v) = p^f.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FiberParams {
    pub p: u64,
    pub e: u32,
    pub f: u32,
}

impl FiberParams {
    pub fn new(p: u64, e: u32, f: u32) -> Result<Self, FiberError> {
        if !rat::is_prime(p) {
            return Err(FiberError::NonPrime(p));
        }
        if p <= 17 {
            return Err(FiberError::PTooSmall(p));
        }
        assert!(e >= 1 && f >= 1, "ramification and residual degree are positive");
        Ok(FiberParams { p, e, f })
    }
}

/// One branch of the dual graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub index: usize,
    /// supersingular width, 1, 2 or 3
    pub width: u32,
    /// number of interior components C_{n,m}, 1 ≤ m ≤ w·e − 1
    pub interior_len: usize,
}

/// A component of the special fiber. `Interior { branch, m }` requires
/// 1 ≤ m ≤ w·e − 1; the aliases m = 0 and m = w·e resolve to the extremal
/// components C∞ and C₀ respectively.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentId {
    Infinity,
    Zero,
    Interior { branch: usize, m: usize },
}

impl ComponentId {
    pub fn json_value(&self) -> serde_json::Value {
        match self {
            ComponentId::Infinity => serde_json::json!({ "t": "inf" }),
            ComponentId::Zero => serde_json::json!({ "t": "zero" }),
            ComponentId::Interior { branch, m } => {
                serde_json::json!({ "t": "int", "n": branch, "m": m })
            }
        }
    }
}

/// The combinatorial special fiber, with its ordered component basis
/// (C∞, interior components branch by branch, C₀). Branches of width 2 or 3
/// come last.
#[derive(Debug, Clone)]
pub struct SpecialFiber {
    pub params: FiberParams,
    pub branches: Vec<Branch>,
    /// number of branches, s = g + 1
    pub s: usize,
    /// genus of X₀(p)
    pub genus: u64,
    /// basis offset of each branch's first interior component
    offsets: Vec<usize>,
    size: usize,
}

/// Branch multiplicities forced by the Eichler mass formula:
/// a₂ = [p ≡ 3 mod 4] branches of width 2, a₃ = [p ≡ 2 mod 3] of width 3.
fn branch_counts(p: u64) -> Result<(u64, u64, u64), FiberError> {
    let a2: u64 = u64::from(p % 4 == 3);
    let a3: u64 = u64::from(p % 3 == 2);
    // s = (p−1)/12 + a₂/2 + 2a₃/3, which must be an integer
    let s_q = Q::new(BigInt::from(p - 1), BigInt::from(12u32))
        + Q::new(BigInt::from(a2), BigInt::from(2u32))
        + Q::new(BigInt::from(2 * a3), BigInt::from(3u32));
    if !s_q.is_integer() {
        return Err(FiberError::NonIntegralMass(p));
    }
    let s = s_q
        .to_integer()
        .try_into()
        .map_err(|_| FiberError::NonIntegralMass(p))?;
    Ok((s, a2, a3))
}

/// Genus of X₀(p) from the mass formula, g = s − 1. Usable for very large p
/// where materializing the branch list would be wasteful.
pub fn genus(p: u64) -> Result<u64, FiberError> {
    if !rat::is_prime(p) {
        return Err(FiberError::NonPrime(p));
    }
    if p <= 17 {
        return Err(FiberError::PTooSmall(p));
    }
    let (s, _, _) = branch_counts(p)?;
    Ok(s - 1)
}

/// Same mass-formula genus without the p > 17 gate, for the homological
/// cross-checks that run down to p = 5.
pub(crate) fn genus_any_prime(p: u64) -> Result<u64, FiberError> {
    if !rat::is_prime(p) || p < 5 {
        return Err(FiberError::NonPrime(p));
    }
    let (s, _, _) = branch_counts(p)?;
    Ok(s - 1)
}

pub fn build_special_fiber(params: FiberParams) -> Result<SpecialFiber, FiberError> {
    let (s, a2, a3) = branch_counts(params.p)?;
    let g = s - 1;
    debug_assert!(
        12 * g + 13 >= params.p && 12 * g <= params.p + 1,
        "genus window (p-13)/12 <= g <= (p+1)/12"
    );
    let e = params.e as usize;
    let mut branches = Vec::with_capacity(s as usize);
    for n in 0..s as usize {
        // width-1 branches first, exceptional widths at the end of the basis
        let width = if (n as u64) < s - a2 - a3 {
            1
        } else if (n as u64) < s - a3 {
            2
        } else {
            3
        };
        branches.push(Branch {
            index: n,
            width,
            interior_len: width as usize * e - 1,
        });
    }
    let mut offsets = Vec::with_capacity(branches.len());
    let mut cursor = 1; // slot 0 is C∞
    for b in &branches {
        offsets.push(cursor);
        cursor += b.interior_len;
    }
    let size = cursor + 1; // final slot is C₀
    let fiber = SpecialFiber {
        params,
        branches,
        s: s as usize,
        genus: g,
        offsets,
        size,
    };
    debug_assert!(fiber.mass_check());
    Ok(fiber)
}

impl SpecialFiber {
    /// Σ 1/wₙ == (p−1)/12, exactly.
    pub fn mass_check(&self) -> bool {
        let mass: Q = self
            .branches
            .iter()
            .map(|b| Q::new(BigInt::from(1), BigInt::from(b.width)))
            .sum();
        mass == Q::new(BigInt::from(self.params.p - 1), BigInt::from(12u32))
    }

    pub fn component_count(&self) -> usize {
        self.size
    }

    /// Components in basis order.
    pub fn components(&self) -> Vec<ComponentId> {
        let mut out = Vec::with_capacity(self.size);
        out.push(ComponentId::Infinity);
        for b in &self.branches {
            for m in 1..=b.interior_len {
                out.push(ComponentId::Interior { branch: b.index, m });
            }
        }
        out.push(ComponentId::Zero);
        out
    }

    /// Basis index of a component, resolving the extremal aliases
    /// C_{n,0} = C∞ and C_{n,w·e} = C₀.
    pub fn index_of(&self, c: ComponentId) -> Result<usize, FiberError> {
        match c {
            ComponentId::Infinity => Ok(0),
            ComponentId::Zero => Ok(self.size - 1),
            ComponentId::Interior { branch, m } => {
                let b = self
                    .branches
                    .get(branch)
                    .ok_or(FiberError::ComponentOutOfRange { branch, m })?;
                let full = b.width as usize * self.params.e as usize;
                if m == 0 {
                    Ok(0)
                } else if m == full {
                    Ok(self.size - 1)
                } else if m <= b.interior_len {
                    Ok(self.offsets[branch] + m - 1)
                } else {
                    Err(FiberError::ComponentOutOfRange { branch, m })
                }
            }
        }
    }

    pub fn component_at(&self, idx: usize) -> ComponentId {
        if idx == 0 {
            ComponentId::Infinity
        } else if idx == self.size - 1 {
            ComponentId::Zero
        } else {
            let branch = self
                .offsets
                .partition_point(|&o| o <= idx)
                .saturating_sub(1);
            ComponentId::Interior {
                branch,
                m: idx - self.offsets[branch] + 1,
            }
        }
    }

    /// The full fiber Σ_C [C], numerically trivial.
    pub fn full_fiber(&self) -> VerticalDivisor {
        VerticalDivisor {
            coeffs: vec![Q::one(); self.size],
            infty_normalized: false,
        }
    }
}

/// A vertical divisor supported on the fiber, as exact rational multiples of
/// the basis components. Intersection numbers against it are in units of
/// log #k(v). Divisors produced by the solvers carry coefficient 0 at C∞;
/// the antisymmetrized cuspidal class is the deliberate exception and is
/// flagged by `infty_normalized = false`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerticalDivisor {
    coeffs: Vec<Q>,
    pub infty_normalized: bool,
}

impl VerticalDivisor {
    pub fn zero(fiber: &SpecialFiber) -> Self {
        VerticalDivisor {
            coeffs: vec![Q::zero(); fiber.component_count()],
            infty_normalized: true,
        }
    }

    /// Divisor with the given coefficients in basis order.
    pub fn from_coeffs(fiber: &SpecialFiber, coeffs: Vec<Q>) -> Result<Self, FiberError> {
        if coeffs.len() != fiber.component_count() {
            return Err(FiberError::ComponentOutOfRange {
                branch: 0,
                m: coeffs.len(),
            });
        }
        let normalized = coeffs[0].is_zero();
        Ok(VerticalDivisor {
            coeffs,
            infty_normalized: normalized,
        })
    }

    pub fn coeffs(&self) -> &[Q] {
        &self.coeffs
    }

    pub fn coeff(&self, fiber: &SpecialFiber, c: ComponentId) -> Result<Q, FiberError> {
        Ok(self.coeffs[fiber.index_of(c)?].clone())
    }

    pub fn scale(&self, f: &Q) -> VerticalDivisor {
        VerticalDivisor {
            coeffs: self.coeffs.iter().map(|x| x * f).collect(),
            infty_normalized: self.infty_normalized,
        }
    }

    pub fn add(&self, other: &VerticalDivisor) -> VerticalDivisor {
        let coeffs: Vec<Q> = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| a + b)
            .collect();
        let normalized = coeffs[0].is_zero();
        VerticalDivisor {
            coeffs,
            infty_normalized: normalized,
        }
    }

    pub fn json_value(&self, fiber: &SpecialFiber) -> serde_json::Value {
        let comps = fiber.components();
        let entries: Vec<serde_json::Value> = comps
            .iter()
            .zip(&self.coeffs)
            .map(|(c, v)| {
                serde_json::json!({
                    "component": c.json_value(),
                    "value": rat::format_q(v),
                })
            })
            .collect();
        serde_json::json!({
            "p": fiber.params.p,
            "e": fiber.params.e,
            "f": fiber.params.f,
            "infty_normalized": self.infty_normalized,
            "coefficients": entries,
        })
    }
}

/// The intersection matrix on the component basis, in units of log #k(v).
/// Each branch contributes a tridiagonal block with −2 on the diagonal;
/// the extremal components have self-intersection −s. Branches with no
/// interior component (width 1, e = 1) appear as direct C∞–C₀ adjacencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntersectionMatrix {
    pub size: usize,
    pub rows: Vec<Vec<i64>>,
}

pub fn intersection_matrix(fiber: &SpecialFiber) -> IntersectionMatrix {
    let n = fiber.component_count();
    let last = n - 1;
    let mut rows = vec![vec![0i64; n]; n];
    rows[0][0] = -(fiber.s as i64);
    rows[last][last] = -(fiber.s as i64);
    for b in &fiber.branches {
        if b.interior_len == 0 {
            rows[0][last] += 1;
            rows[last][0] += 1;
            continue;
        }
        let first = fiber.offsets[b.index];
        let end = first + b.interior_len - 1;
        rows[0][first] = 1;
        rows[first][0] = 1;
        rows[last][end] = 1;
        rows[end][last] = 1;
        for i in first..=end {
            rows[i][i] = -2;
            if i < end {
                rows[i][i + 1] = 1;
                rows[i + 1][i] = 1;
            }
        }
    }
    IntersectionMatrix { size: n, rows }
}

impl IntersectionMatrix {
    pub fn to_qmat(&self) -> QMat {
        QMat::from_i64(&self.rows)
    }

    pub fn det(&self) -> BigInt {
        let rows: Vec<Vec<BigInt>> = self
            .rows
            .iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect();
        det_bigint(&rows)
    }

    pub fn json_value(&self, fiber: &SpecialFiber) -> serde_json::Value {
        let comps: Vec<serde_json::Value> =
            fiber.components().iter().map(|c| c.json_value()).collect();
        serde_json::json!({
            "p": fiber.params.p,
            "e": fiber.params.e,
            "f": fiber.params.f,
            "size": self.size,
            "components": comps,
            "rows": self.rows,
        })
    }
}

/// The tridiagonal branch block of size k = w·e − 1 (−2 diagonal, 1 off).
/// Its determinant is (−1)^(we−1)·w·e.
pub fn branch_block(k: usize) -> Vec<Vec<i64>> {
    let mut rows = vec![vec![0i64; k]; k];
    for i in 0..k {
        rows[i][i] = -2;
        if i + 1 < k {
            rows[i][i + 1] = 1;
            rows[i + 1][i] = 1;
        }
    }
    rows
}

/// Solve M·Φ = δ_{C_P} − δ_{C∞} with the normalization "coefficient 0 at
/// C∞" appended as an extra row. M is singular with kernel the full fiber,
/// so the augmented system has a unique exact solution.
pub fn solve_vertical_divisor(
    fiber: &SpecialFiber,
    target: ComponentId,
) -> Result<VerticalDivisor, FiberError> {
    let idx = fiber.index_of(target)?;
    Ok(solve_many(fiber, &[idx]).remove(0))
}

/// Vertical divisors for every component target at once (basis order),
/// sharing a single elimination of the normalized system.
pub fn solve_all_vertical_divisors(fiber: &SpecialFiber) -> Vec<VerticalDivisor> {
    let all: Vec<usize> = (0..fiber.component_count()).collect();
    solve_many(fiber, &all)
}

fn solve_many(fiber: &SpecialFiber, targets: &[usize]) -> Vec<VerticalDivisor> {
    let n = fiber.component_count();
    let m = intersection_matrix(fiber);
    let mut a = QMat::zeros(n + 1, n);
    for i in 0..n {
        for j in 0..n {
            if m.rows[i][j] != 0 {
                a[(i, j)] = q_int(m.rows[i][j]);
            }
        }
    }
    a[(n, 0)] = Q::one(); // normalization row: coefficient at C∞ is 0
    let mut rhs = QMat::zeros(n + 1, targets.len());
    for (col, &t) in targets.iter().enumerate() {
        rhs[(t, col)] += Q::one();
        rhs[(0, col)] -= Q::one();
    }
    let x = a
        .solve_columns(&rhs)
        .expect("normalized intersection system is uniquely solvable");
    targets
        .iter()
        .enumerate()
        .map(|(col, _)| VerticalDivisor {
            coeffs: (0..n).map(|i| x[(i, col)].clone()).collect(),
            infty_normalized: true,
        })
        .collect()
}

/// Closed-form coefficients for the vertical divisor Φ_P:
///
/// - target C₀: a_{n,m} = −12m / ((p−1)wₙ);
/// - target C_{n₀,m₀}: on the target branch, before the target
///   a_{n₀,m} = (m₀/(w₀e)·(1 − 12/((p−1)w₀)) − 1)·m, after it
///   a_{n₀,m} = (m₀/(w₀e)·(1 − 12/((p−1)w₀)))·m − m₀, and on every other
///   branch a_{n,m} = −12m₀/((p−1)w₀e) · m/wₙ;
/// - target C∞: zero.
///
/// Agrees with `solve_vertical_divisor` exactly.
pub fn closed_form_phi(
    fiber: &SpecialFiber,
    target: ComponentId,
) -> Result<VerticalDivisor, FiberError> {
    let p = fiber.params.p;
    let e = fiber.params.e as i64;
    let pm1 = q_int(p as i64 - 1);
    let idx = fiber.index_of(target)?;
    if idx == 0 {
        return Ok(VerticalDivisor::zero(fiber));
    }
    let mut coeffs = vec![Q::zero(); fiber.component_count()];
    if idx == fiber.component_count() - 1 {
        // target C₀
        for b in &fiber.branches {
            let alpha = q_int(-12) / (&pm1 * q_int(b.width as i64));
            for m in 1..=b.interior_len {
                coeffs[fiber.offsets[b.index] + m - 1] = &alpha * q_int(m as i64);
            }
        }
        coeffs[fiber.component_count() - 1] = q_int(-12 * e) / &pm1;
    } else {
        let ComponentId::Interior { branch: n0, m: m0 } = fiber.component_at(idx) else {
            unreachable!("interior index resolves to an interior component")
        };
        let w0 = fiber.branches[n0].width as i64;
        let w0e = q_int(w0 * e);
        let m0q = q_int(m0 as i64);
        // slope before the target, and affine part after it
        let shrink = Q::one() - q_int(12) / (&pm1 * q_int(w0));
        let before = &m0q / &w0e * &shrink - Q::one();
        let after = &m0q / &w0e * &shrink;
        for b in &fiber.branches {
            for m in 1..=b.interior_len {
                let mq = q_int(m as i64);
                let val = if b.index == n0 {
                    if m <= m0 {
                        &before * &mq
                    } else {
                        &after * &mq - &m0q
                    }
                } else {
                    q_int(-12) * &m0q / (&pm1 * &w0e) * &mq / q_int(b.width as i64)
                };
                coeffs[fiber.offsets[b.index] + m - 1] = val;
            }
        }
        // value at C₀, branch-independent
        coeffs[fiber.component_count() - 1] = q_int(-12) * &m0q / (&pm1 * q_int(w0));
    }
    Ok(VerticalDivisor {
        coeffs,
        infty_normalized: true,
    })
}

/// Vertical part of the relative dualizing sheaf: (g−1)·Φ_{C₀}, with
/// coefficients 12(1−g)m/((p−1)wₙ), each within [−e, 0].
pub fn phi_omega(fiber: &SpecialFiber) -> VerticalDivisor {
    let phi0 = closed_form_phi(fiber, ComponentId::Zero)
        .expect("C0 is always a valid target");
    phi0.scale(&q_int(fiber.genus as i64 - 1))
}

/// The antisymmetrized cuspidal divisor class, with coefficient
/// 6/(p−1)·(e − 2m/wₙ) at C_{n,m}. Its C∞ coefficient 6e/(p−1) is nonzero
/// by construction: this is the Fricke eigenvector representative, exempt
/// from the zero-at-C∞ normalization.
pub fn cuspidal_divisor_class(fiber: &SpecialFiber) -> VerticalDivisor {
    let p = fiber.params.p;
    let e = fiber.params.e as i64;
    let scale = q_int(6) / q_int(p as i64 - 1);
    let mut coeffs = vec![Q::zero(); fiber.component_count()];
    coeffs[0] = &scale * q_int(e);
    coeffs[fiber.component_count() - 1] = -&scale * q_int(e);
    for b in &fiber.branches {
        for m in 1..=b.interior_len {
            let inner = q_int(e) - q_int(2 * m as i64) / q_int(b.width as i64);
            coeffs[fiber.offsets[b.index] + m - 1] = &scale * inner;
        }
    }
    VerticalDivisor {
        coeffs,
        infty_normalized: false,
    }
}

/// Pull a divisor back along the Fricke involution of the dual graph:
/// C_{n,m} ↦ C_{perm(n), wₙe − m}, swapping C₀ and C∞. The branch
/// permutation must preserve widths and be an involution (the graph action
/// squares to the identity); it defaults to the identity.
pub fn fricke_involution(
    fiber: &SpecialFiber,
    div: &VerticalDivisor,
    branch_perm: Option<&[usize]>,
) -> Result<VerticalDivisor, FiberError> {
    let s = fiber.s;
    let identity: Vec<usize> = (0..s).collect();
    let perm = branch_perm.unwrap_or(&identity);
    if perm.len() != s {
        return Err(FiberError::InvalidPermutation(format!(
            "expected {s} entries, got {}",
            perm.len()
        )));
    }
    let mut seen = vec![false; s];
    for (n, &img) in perm.iter().enumerate() {
        if img >= s || seen[img] {
            return Err(FiberError::InvalidPermutation(
                "not a permutation of the branches".into(),
            ));
        }
        seen[img] = true;
        if fiber.branches[n].width != fiber.branches[img].width {
            return Err(FiberError::InvalidPermutation(format!(
                "width not preserved at branch {n}"
            )));
        }
        if perm[img] != n {
            return Err(FiberError::InvalidPermutation(
                "branch permutation must be an involution".into(),
            ));
        }
    }
    let n = fiber.component_count();
    let mut coeffs = Vec::with_capacity(n);
    for idx in 0..n {
        let image = match fiber.component_at(idx) {
            ComponentId::Infinity => ComponentId::Zero,
            ComponentId::Zero => ComponentId::Infinity,
            ComponentId::Interior { branch, m } => {
                let full = fiber.branches[branch].width as usize * fiber.params.e as usize;
                ComponentId::Interior {
                    branch: perm[branch],
                    m: full - m,
                }
            }
        };
        coeffs.push(div.coeffs[fiber.index_of(image)?].clone());
    }
    let normalized = coeffs[0].is_zero();
    Ok(VerticalDivisor {
        coeffs,
        infty_normalized: normalized,
    })
}

/// Check M·Φ = δ_target − δ_{C∞} exactly, in units of log #k(v).
pub fn verify_intersection_equation(
    fiber: &SpecialFiber,
    div: &VerticalDivisor,
    target: ComponentId,
) -> Result<bool, FiberError> {
    let m = intersection_matrix(fiber).to_qmat();
    let image = m.mul_vec(div.coeffs());
    let t = fiber.index_of(target)?;
    for (i, v) in image.iter().enumerate() {
        let mut expect = Q::zero();
        if i == t {
            expect += Q::one();
        }
        if i == 0 {
            expect -= Q::one();
        }
        if *v != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Smallest and largest coefficient of a divisor.
pub fn coeff_range(div: &VerticalDivisor) -> (Q, Q) {
    let mut lo = Q::zero();
    let mut hi = Q::zero();
    for c in div.coeffs() {
        if *c < lo {
            lo = c.clone();
        }
        if *c > hi {
            hi = c.clone();
        }
    }
    (lo, hi)
}

/// Report-time conversion: multiply a pairing in units of log #k(v) by
/// f_v·log p (as a float; the exact path keeps the rational coefficient).
pub fn pairing_to_log_units(fiber: &SpecialFiber, value: &Q) -> f64 {
    rat::q_to_f64(value) * fiber.params.f as f64 * (fiber.params.p as f64).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    fn fiber(p: u64, e: u32) -> SpecialFiber {
        build_special_fiber(FiberParams::new(p, e, 1).unwrap()).unwrap()
    }

    #[test]
    fn build_examples() {
        // p=23: mass 11/6 = 1 + 1/2 + 1/3, s=3, g=2, widths {1,2,3}
        let f23 = fiber(23, 1);
        assert_eq!((f23.s, f23.genus), (3, 2));
        let mut widths: Vec<u32> = f23.branches.iter().map(|b| b.width).collect();
        widths.sort_unstable();
        assert_eq!(widths, vec![1, 2, 3]);

        // p=37: all three branches of width 1
        let f37 = fiber(37, 1);
        assert_eq!((f37.s, f37.genus), (3, 2));
        assert!(f37.branches.iter().all(|b| b.width == 1));

        // p=19, e=2: s=2, g=1, widths {1,2}, interior lengths {1,3}
        let f19 = fiber(19, 2);
        assert_eq!((f19.s, f19.genus), (2, 1));
        let mut lens: Vec<usize> = f19.branches.iter().map(|b| b.interior_len).collect();
        lens.sort_unstable();
        assert_eq!(lens, vec![1, 3]);
    }

    #[test]
    fn build_rejects_bad_params() {
        assert_eq!(
            FiberParams::new(21, 1, 1).unwrap_err(),
            FiberError::NonPrime(21)
        );
        assert_eq!(
            FiberParams::new(17, 1, 1).unwrap_err(),
            FiberError::PTooSmall(17)
        );
    }

    #[test]
    fn genus_matches_full_build() {
        for p in rat::primes_in(19, 600) {
            assert_eq!(genus(p).unwrap(), fiber(p, 1).genus);
        }
    }

    #[test]
    fn block_determinants() {
        // w=1, e=3: 2x2 tridiagonal with determinant 3
        let block = branch_block(2);
        assert_eq!(block, vec![vec![-2, 1], vec![1, -2]]);
        let det = det_bigint(
            &block
                .iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect::<Vec<_>>(),
        );
        assert_eq!(det, BigInt::from(3));
    }

    #[test]
    fn matrix_shape_and_row_sums() {
        for &(p, e) in &[(23u64, 1u32), (19, 2), (37, 1), (29, 3)] {
            let f = fiber(p, e);
            let m = intersection_matrix(&f);
            for i in 0..m.size {
                assert_eq!(
                    m.rows[i].iter().sum::<i64>(),
                    0,
                    "row {i} sums to zero at p={p}, e={e}"
                );
                for j in 0..m.size {
                    assert_eq!(m.rows[i][j], m.rows[j][i], "symmetry at p={p}, e={e}");
                }
            }
        }
        // p=23, e=1: degenerate width-1 branch gives a direct C∞–C₀ entry
        let f = fiber(23, 1);
        let m = intersection_matrix(&f);
        assert_eq!(m.rows[0][m.size - 1], 1);
    }

    #[test]
    fn full_fiber_in_kernel() {
        for &(p, e) in &[(23u64, 1u32), (19, 2), (31, 2)] {
            let f = fiber(p, e);
            let m = intersection_matrix(&f).to_qmat();
            let ones = vec![Q::one(); f.component_count()];
            assert!(m.mul_vec(&ones).iter().all(|x| x.is_zero()));
            assert_eq!(m.rank(), f.component_count() - 1);
        }
    }

    #[test]
    fn solve_target_c0_at_23() {
        let f = fiber(23, 1);
        let phi = solve_vertical_divisor(&f, ComponentId::Zero).unwrap();
        // a_{n,m} = −12m/(22 wₙ)
        for b in &f.branches {
            for m in 1..=b.interior_len {
                let got = phi
                    .coeff(&f, ComponentId::Interior { branch: b.index, m })
                    .unwrap();
                let want = q(-12 * m as i64, 22 * b.width as i64);
                assert_eq!(got, want);
            }
        }
        assert_eq!(phi.coeff(&f, ComponentId::Zero).unwrap(), q(-6, 11));
        assert_eq!(phi.coeff(&f, ComponentId::Infinity).unwrap(), Q::zero());
        let w2 = f.branches.iter().find(|b| b.width == 2).unwrap();
        assert_eq!(
            phi.coeff(&f, ComponentId::Interior { branch: w2.index, m: 1 })
                .unwrap(),
            q(-3, 11)
        );
        let w3 = f.branches.iter().find(|b| b.width == 3).unwrap();
        assert_eq!(
            phi.coeff(&f, ComponentId::Interior { branch: w3.index, m: 1 })
                .unwrap(),
            q(-2, 11)
        );
        assert_eq!(
            phi.coeff(&f, ComponentId::Interior { branch: w3.index, m: 2 })
                .unwrap(),
            q(-4, 11)
        );
    }

    #[test]
    fn solve_interior_target_at_23() {
        let f = fiber(23, 1);
        let w2 = f.branches.iter().find(|b| b.width == 2).unwrap().index;
        let w3 = f.branches.iter().find(|b| b.width == 3).unwrap().index;
        let target = ComponentId::Interior { branch: w2, m: 1 };
        let phi = solve_vertical_divisor(&f, target).unwrap();
        assert_eq!(phi.coeff(&f, target).unwrap(), q(-7, 11));
        assert_eq!(
            phi.coeff(&f, ComponentId::Interior { branch: w3, m: 1 })
                .unwrap(),
            q(-1, 11)
        );
        assert_eq!(
            phi.coeff(&f, ComponentId::Interior { branch: w3, m: 2 })
                .unwrap(),
            q(-2, 11)
        );
        assert_eq!(phi.coeff(&f, ComponentId::Zero).unwrap(), q(-3, 11));
    }

    #[test]
    fn infinity_target_is_zero_divisor() {
        let f = fiber(23, 1);
        let phi = solve_vertical_divisor(&f, ComponentId::Infinity).unwrap();
        assert!(phi.coeffs().iter().all(|x| x.is_zero()));
        let cf = closed_form_phi(&f, ComponentId::Infinity).unwrap();
        assert_eq!(phi, cf);
    }

    #[test]
    fn closed_form_matches_solver() {
        for &(p, e) in &[(19u64, 1u32), (19, 2), (23, 1), (23, 2), (29, 3), (37, 1)] {
            let f = fiber(p, e);
            let solved = solve_all_vertical_divisors(&f);
            for (idx, sol) in solved.iter().enumerate() {
                let target = f.component_at(idx);
                let cf = closed_form_phi(&f, target).unwrap();
                assert_eq!(*sol, cf, "p={p}, e={e}, target {target:?}");
                assert!(verify_intersection_equation(&f, sol, target).unwrap());
            }
        }
    }

    #[test]
    fn coefficient_bounds() {
        for &(p, e) in &[(19u64, 1u32), (23, 2), (29, 1), (43, 3)] {
            let f = fiber(p, e);
            let minus_3e = q(-3 * e as i64, 1);
            for div in solve_all_vertical_divisors(&f) {
                let (lo, hi) = coeff_range(&div);
                assert!(hi <= Q::zero());
                assert!(lo >= minus_3e, "sizePhi bound at p={p}, e={e}");
            }
            // case (a): 0 ≥ a ≥ −12e/(p−1)
            let phi0 = closed_form_phi(&f, ComponentId::Zero).unwrap();
            let (lo, _) = coeff_range(&phi0);
            assert!(lo >= q(-12 * e as i64, p as i64 - 1));
        }
    }

    #[test]
    fn omega_divisor() {
        let f23 = fiber(23, 1);
        let om = phi_omega(&f23);
        let w3 = f23.branches.iter().find(|b| b.width == 3).unwrap().index;
        // (g−1)·(−4/11) with g = 2
        assert_eq!(
            om.coeff(&f23, ComponentId::Interior { branch: w3, m: 2 })
                .unwrap(),
            q(-4, 11)
        );
        // g=1 fiber: zero divisor
        let f19 = fiber(19, 1);
        assert!(phi_omega(&f19).coeffs().iter().all(|x| x.is_zero()));
        // bound 0 ≥ ω ≥ −e over a sweep
        for p in rat::primes_in(19, 199) {
            for e in [1u32, 2, 3] {
                let f = fiber(p, e);
                let (lo, hi) = coeff_range(&phi_omega(&f));
                assert!(hi <= Q::zero());
                assert!(lo >= q(-(e as i64), 1), "sizePhiOmega at p={p}, e={e}");
            }
        }
    }

    #[test]
    fn cuspidal_class() {
        let f = fiber(23, 1);
        let cusp = cuspidal_divisor_class(&f);
        assert!(!cusp.infty_normalized);
        assert_eq!(cusp.coeff(&f, ComponentId::Infinity).unwrap(), q(6, 22));
        assert_eq!(cusp.coeff(&f, ComponentId::Zero).unwrap(), q(-6, 22));
        let w3 = f.branches.iter().find(|b| b.width == 3).unwrap().index;
        assert_eq!(
            cusp.coeff(&f, ComponentId::Interior { branch: w3, m: 1 })
                .unwrap(),
            q(1, 11)
        );
        // cusp class = Φ_{C₀} + (6e/(p−1))·full fiber
        let phi0 = closed_form_phi(&f, ComponentId::Zero).unwrap();
        let shift = f.full_fiber().scale(&q(6, 22));
        assert_eq!(cusp, phi0.add(&shift));
    }

    #[test]
    fn fricke_properties() {
        let f = fiber(23, 2);
        let cusp = cuspidal_divisor_class(&f);
        let fr = fricke_involution(&f, &cusp, None).unwrap();
        assert_eq!(fr, cusp.scale(&q(-1, 1)));

        let phi = solve_vertical_divisor(&f, ComponentId::Zero).unwrap();
        let back = fricke_involution(&f, &fricke_involution(&f, &phi, None).unwrap(), None)
            .unwrap();
        assert_eq!(back.coeffs(), phi.coeffs());

        let full = f.full_fiber();
        let fr_full = fricke_involution(&f, &full, None).unwrap();
        assert_eq!(fr_full.coeffs(), full.coeffs());

        // swapping two width-1 branches is a legal involution
        let f37 = fiber(37, 2);
        let perm = vec![1usize, 0, 2];
        assert!(fricke_involution(&f37, &f37.full_fiber(), Some(&perm)).is_ok());
        // a 3-cycle is rejected
        let cycle = vec![1usize, 2, 0];
        assert!(matches!(
            fricke_involution(&f37, &f37.full_fiber(), Some(&cycle)),
            Err(FiberError::InvalidPermutation(_))
        ));
        // width-breaking permutation is rejected
        let f23 = fiber(23, 1);
        let bad = vec![1usize, 0, 2];
        assert!(matches!(
            fricke_involution(&f23, &f23.full_fiber(), Some(&bad)),
            Err(FiberError::InvalidPermutation(_))
        ));
    }

    #[test]
    fn interior_alias_resolution() {
        let f = fiber(23, 1);
        let idx0 = f
            .index_of(ComponentId::Interior { branch: 1, m: 0 })
            .unwrap();
        assert_eq!(idx0, 0);
        let w2 = f.branches.iter().find(|b| b.width == 2).unwrap();
        let full = w2.width as usize * f.params.e as usize;
        let idx_last = f
            .index_of(ComponentId::Interior { branch: w2.index, m: full })
            .unwrap();
        assert_eq!(idx_last, f.component_count() - 1);
        assert!(f
            .index_of(ComponentId::Interior { branch: 0, m: 99 })
            .is_err());
    }

    #[test]
    fn divisor_json_shape() {
        let f = fiber(23, 1);
        let phi = solve_vertical_divisor(&f, ComponentId::Zero).unwrap();
        let v = phi.json_value(&f);
        assert_eq!(v["p"], 23);
        let coeffs = v["coefficients"].as_array().unwrap();
        assert_eq!(coeffs.len(), f.component_count());
        assert_eq!(coeffs[0]["component"]["t"], "inf");
        assert_eq!(coeffs[0]["value"], "0/1");
    }
}
