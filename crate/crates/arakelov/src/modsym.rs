//! Modular symbols for Γ₀(p): the quotient of the p+1 Manin symbols
//! indexed by P¹(F_p) by the two- and three-term relations, the cuspidal
//! subspace, Hecke operators and the Atkin-Lehner involution on it, and the
//! dimension of the winding quotient J_e.
//!
//! Symbols are the classes of (c:d) ∈ P¹(F_p) under
//!   S: (c:d) ↦ (d:−c)  with relation x + xS = 0,
//!   T: (c:d) ↦ (d:−c−d) with relation x + xT + xT² = 0,
//! where S = [[0,−1],[1,0]] and T = [[0,−1],[1,−1]] act on the right.
//! The class of (c:d) is the modular symbol {g0, g∞} for any g ∈ SL₂(Z)
//! with bottom row (c,d). General paths {α,β} are rewritten into Manin
//! symbols through continued-fraction convergents, which is how the Hecke,
//! Fricke and star actions are computed.
//!
//! All linear algebra is exact over Q. Only dimensions and ranks are
//! produced; no q-expansions or periods.

use crate::fiber;
use crate::heights;
use crate::linalg::{sparse_eliminate, Echelon, QMat};
use crate::rat::{self, is_prime, q_int, Q};
use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModsymError {
    #[error("p = {0} must be a prime larger than 3")]
    NonPrime(u64),
    #[error("Hecke index {0} must be a prime different from p")]
    BadPrime(u64),
    #[error("Hecke primes up to the Sturm bound {bound} are required, missing {missing}")]
    SturmNotReached { bound: u64, missing: u64 },
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

/// A projective rational n/d, with ∞ = (1, 0). Kept on i64: every endpoint
/// this module produces is bounded by p² in absolute value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct ProjRat {
    n: i64,
    d: i64,
}

impl ProjRat {
    const INFINITY: ProjRat = ProjRat { n: 1, d: 0 };

    fn new(n: i64, d: i64) -> ProjRat {
        if d == 0 {
            return ProjRat::INFINITY;
        }
        let g = gcd_i64(n.abs(), d.abs());
        let (mut n, mut d) = (n / g, d / g);
        if d < 0 {
            n = -n;
            d = -d;
        }
        ProjRat { n, d }
    }

    fn is_infinity(&self) -> bool {
        self.d == 0
    }

    /// Möbius action of an integer matrix [[a,b],[c,d]].
    fn apply(&self, m: [[i64; 2]; 2]) -> ProjRat {
        ProjRat::new(
            m[0][0] * self.n + m[0][1] * self.d,
            m[1][0] * self.n + m[1][1] * self.d,
        )
    }

    fn neg(&self) -> ProjRat {
        ProjRat::new(-self.n, self.d)
    }
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.max(1)
    } else {
        gcd_i64(b, a % b)
    }
}

/// The Manin-symbol presentation of the homology of X₀(p): raw symbols,
/// their projection to the relation quotient, the boundary map to the cusp
/// space {∞, 0}, and an echelonized basis of the cuspidal kernel.
#[derive(Debug, Clone)]
pub struct ManinSpace {
    pub p: u64,
    /// the p+1 normalized symbols: (0,1) then (1,d) for d = 0..p−1
    symbols: Vec<(u64, u64)>,
    /// raw symbol → expression over the quotient basis
    proj: Vec<Vec<(usize, Q)>>,
    /// raw symbol index carried by each quotient coordinate
    q_basis_raw: Vec<usize>,
    pub q_dim: usize,
    /// boundary of each quotient generator: (coefficient at [∞], at [0])
    boundary: Vec<(Q, Q)>,
    /// echelon basis rows of ker(boundary), dimension 2g
    cuspidal: Vec<Vec<Q>>,
    cuspidal_pivots: Vec<usize>,
    pub genus: u64,
}

fn normalize_symbol(p: u64, c: i64, d: i64) -> (u64, u64) {
    let pi = p as i64;
    let c = c.rem_euclid(pi) as u64;
    let d = d.rem_euclid(pi) as u64;
    if c == 0 {
        assert!(d != 0, "(0:0) is not a projective point");
        (0, 1)
    } else {
        let inv = mod_inverse(c, p);
        (1, d * inv % p)
    }
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p prime, a not divisible by p
    let (mut old_r, mut r) = (a as i64, p as i64);
    let (mut old_s, mut s) = (1i64, 0i64);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1);
    old_s.rem_euclid(p as i64) as u64
}

fn symbol_index(_p: u64, sym: (u64, u64)) -> usize {
    if sym.0 == 0 {
        0
    } else {
        1 + sym.1 as usize
    }
}

/// Endpoints (g0, g∞) of the modular symbol attached to a normalized Manin
/// symbol, for an explicit SL₂(Z) lift g with that bottom row.
fn symbol_path(sym: (u64, u64)) -> (ProjRat, ProjRat) {
    match sym {
        (0, _) => (ProjRat::new(0, 1), ProjRat::INFINITY), // identity lift
        (1, 0) => (ProjRat::INFINITY, ProjRat::new(1, 1)), // [[1,−1],[1,0]]
        (1, d) => {
            // [[1, d−1],[1, d]]
            let d = d as i64;
            (ProjRat::new(d - 1, d), ProjRat::new(1, 1))
        }
        _ => unreachable!("symbols are normalized"),
    }
}

/// Write {∞, x} as a sum of unimodular symbols through the convergents of
/// x, returning Manin-symbol indices with ±1 coefficients.
fn path_from_infinity(p: u64, x: ProjRat, out: &mut Vec<(usize, i64)>, sign: i64) {
    if x.is_infinity() {
        return;
    }
    let (mut n, mut d) = (x.n, x.d);
    let mut quotients = Vec::new();
    while d != 0 {
        let a = n.div_euclid(d);
        quotients.push(a);
        (n, d) = (d, n - a * d);
    }
    // convergents h_j/k_j with h_{−1}/k_{−1} = 1/0
    let (mut h_prev, mut k_prev) = (1i64, 0i64);
    let (mut h, mut k) = (quotients[0], 1i64);
    let mut parity = -1i64; // (−1)^(j−1) at j = 0
    let sym = normalize_symbol(p, k, parity * k_prev);
    out.push((symbol_index(p, sym), sign));
    for &a in &quotients[1..] {
        let h_next = a * h + h_prev;
        let k_next = a * k + k_prev;
        (h_prev, k_prev, h, k) = (h, k, h_next, k_next);
        parity = -parity;
        let sym = normalize_symbol(p, k, parity * k_prev);
        out.push((symbol_index(p, sym), sign));
    }
}

/// {α, β} = {∞, β} − {∞, α} as Manin symbols.
fn manin_path(p: u64, alpha: ProjRat, beta: ProjRat) -> Vec<(usize, i64)> {
    let mut out = Vec::new();
    path_from_infinity(p, beta, &mut out, 1);
    path_from_infinity(p, alpha, &mut out, -1);
    out
}

pub fn build_manin_space(p: u64) -> Result<ManinSpace, ModsymError> {
    if p <= 3 || !is_prime(p) {
        return Err(ModsymError::NonPrime(p));
    }
    let genus = fiber::genus_any_prime(p)
        .map_err(|e| ModsymError::Internal(format!("genus computation failed: {e}")))?;
    let count = p as usize + 1;
    let mut symbols = Vec::with_capacity(count);
    symbols.push((0u64, 1u64));
    for d in 0..p {
        symbols.push((1, d));
    }

    // two-term relations: each S-orbit collapses to a signed generator,
    // S-fixed symbols die (2x = 0 over Q)
    let s_image = |i: usize| {
        let (c, d) = symbols[i];
        symbol_index(p, normalize_symbol(p, d as i64, -(c as i64)))
    };
    let mut gen_of: Vec<Option<(usize, i64)>> = vec![None; count];
    let mut generators = Vec::new();
    for i in 0..count {
        if gen_of[i].is_some() {
            continue;
        }
        let j = s_image(i);
        if j == i {
            gen_of[i] = Some((usize::MAX, 0)); // zero symbol
        } else {
            let id = generators.len();
            generators.push(i);
            gen_of[i] = Some((id, 1));
            gen_of[j] = Some((id, -1));
        }
    }
    let to_gen = |i: usize| -> Option<(usize, i64)> {
        match gen_of[i] {
            Some((usize::MAX, _)) => None,
            Some(pair) => Some(pair),
            None => unreachable!(),
        }
    };

    // three-term relations over the surviving generators
    let t_image = |i: usize| {
        let (c, d) = symbols[i];
        symbol_index(p, normalize_symbol(p, d as i64, -(c as i64) - d as i64))
    };
    let mut rows = Vec::new();
    let mut seen = vec![false; count];
    for i in 0..count {
        if seen[i] {
            continue;
        }
        let j = t_image(i);
        let k = t_image(j);
        seen[i] = true;
        seen[j] = true;
        seen[k] = true;
        let mut row: Vec<(usize, BigInt)> = Vec::new();
        let orbit: &[usize] = if j == i { &[i, i, i] } else { &[i, j, k] };
        for &x in orbit {
            if let Some((g, sign)) = to_gen(x) {
                row.push((g, BigInt::from(sign)));
            }
        }
        if !row.is_empty() {
            rows.push(row);
        }
    }
    let elim = sparse_eliminate(rows, generators.len());
    let q_dim = elim.free_cols.len();
    if q_dim as u64 != 2 * genus + 1 {
        return Err(ModsymError::Internal(format!(
            "quotient dimension {q_dim} differs from 2g+1 at p = {p}"
        )));
    }

    let mut proj: Vec<Vec<(usize, Q)>> = Vec::with_capacity(count);
    for i in 0..count {
        let expr = match to_gen(i) {
            None => Vec::new(),
            Some((g, sign)) => {
                let signq = q_int(sign);
                elim.project(g)
                    .into_iter()
                    .map(|(col, c)| (col, c * &signq))
                    .filter(|(_, c)| !c.is_zero())
                    .collect()
            }
        };
        proj.push(expr);
    }
    let q_basis_raw: Vec<usize> = elim.free_cols.iter().map(|&g| generators[g]).collect();

    // boundary of {g0, g∞}: [class(g∞)] − [class(g0)], where a cusp a/c is
    // equivalent to ∞ exactly when p | c. On normalized symbols this is
    // (0:1) ↦ [∞]−[0], (1:0) ↦ [0]−[∞], and 0 otherwise.
    let raw_boundary = |i: usize| -> (Q, Q) {
        match symbols[i] {
            (0, _) => (Q::one(), -Q::one()),
            (1, 0) => (-Q::one(), Q::one()),
            _ => (Q::zero(), Q::zero()),
        }
    };
    let boundary: Vec<(Q, Q)> = q_basis_raw.iter().map(|&r| raw_boundary(r)).collect();

    // cuspidal subspace: kernel of the boundary on the quotient
    let mut bmat = QMat::zeros(2, q_dim);
    for (j, (binf, bzero)) in boundary.iter().enumerate() {
        bmat[(0, j)] = binf.clone();
        bmat[(1, j)] = bzero.clone();
    }
    let mut ech = Echelon::new();
    for v in bmat.kernel_basis() {
        ech.insert(v);
    }
    let mut cuspidal = Vec::new();
    let mut cuspidal_pivots = Vec::new();
    for (pivot, row) in ech.rows_for_inspection() {
        cuspidal_pivots.push(pivot);
        cuspidal.push(row);
    }
    if cuspidal.len() as u64 != 2 * genus {
        return Err(ModsymError::Internal(format!(
            "cuspidal dimension {} differs from 2g at p = {p}",
            cuspidal.len()
        )));
    }

    Ok(ManinSpace {
        p,
        symbols,
        proj,
        q_basis_raw,
        q_dim,
        boundary,
        cuspidal,
        cuspidal_pivots,
        genus,
    })
}


impl ManinSpace {
    pub fn raw_symbol_count(&self) -> usize {
        self.symbols.len()
    }

    /// The normalized (c:d) pairs, in index order.
    pub fn symbols(&self) -> &[(u64, u64)] {
        &self.symbols
    }

    /// Raw symbols whose classes form the basis of the relation quotient.
    pub fn quotient_basis_symbols(&self) -> Vec<(u64, u64)> {
        self.q_basis_raw.iter().map(|&i| self.symbols[i]).collect()
    }

    pub fn cuspidal_dimension(&self) -> usize {
        self.cuspidal.len()
    }

    /// Echelonized basis of the cuspidal subspace, rows in quotient
    /// coordinates.
    pub fn cuspidal_basis(&self) -> &[Vec<Q>] {
        &self.cuspidal
    }

    /// Class of a raw symbol (c:d) in quotient coordinates.
    pub fn symbol_class(&self, c: i64, d: i64) -> Vec<Q> {
        let idx = symbol_index(self.p, normalize_symbol(self.p, c, d));
        let mut v = vec![Q::zero(); self.q_dim];
        for (j, coeff) in &self.proj[idx] {
            v[*j] += coeff;
        }
        v
    }

    /// The winding class {0, ∞} in quotient coordinates.
    pub fn winding_class(&self) -> Vec<Q> {
        self.symbol_class(0, 1)
    }

    /// Boundary of a quotient vector: coefficients at ([∞], [0]).
    pub fn boundary_of(&self, v: &[Q]) -> (Q, Q) {
        let mut inf = Q::zero();
        let mut zero = Q::zero();
        for (x, (bi, bz)) in v.iter().zip(&self.boundary) {
            if !x.is_zero() {
                inf += x * bi;
                zero += x * bz;
            }
        }
        (inf, zero)
    }

    /// Coordinates of a cuspidal vector in the echelon basis; errors if the
    /// vector is not exactly in the kernel of the boundary.
    pub fn cuspidal_coords(&self, v: &[Q]) -> Result<Vec<Q>, ModsymError> {
        let mut rem = v.to_vec();
        let mut coords = vec![Q::zero(); self.cuspidal.len()];
        for (i, row) in self.cuspidal.iter().enumerate() {
            let pcol = self.cuspidal_pivots[i];
            if !rem[pcol].is_zero() {
                let f = &rem[pcol] / &row[pcol];
                for (r, b) in rem.iter_mut().zip(row) {
                    *r -= &f * b;
                }
                coords[i] = f;
            }
        }
        if rem.iter().any(|x| !x.is_zero()) {
            return Err(ModsymError::Internal(
                "vector is not in the cuspidal subspace".into(),
            ));
        }
        Ok(coords)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum OpKind {
    Hecke(u64),
    Fricke,
    Star,
}

/// Matrix of an operator on the full relation quotient, columns indexed by
/// the quotient basis symbols.
fn op_on_quotient(space: &ManinSpace, kind: OpKind) -> QMat {
    let p = space.p;
    let q = space.q_dim;
    let mut mat = QMat::zeros(q, q);
    for (col, &raw) in space.q_basis_raw.iter().enumerate() {
        let (alpha, beta) = symbol_path(space.symbols[raw]);
        let mut pieces: Vec<(usize, i64)> = Vec::new();
        match kind {
            OpKind::Hecke(ell) => {
                let l = ell as i64;
                // coset representatives of determinant ℓ
                let mats = std::iter::once([[l, 0], [0, 1]])
                    .chain((0..l).map(|j| [[1, j], [0, l]]));
                for m in mats {
                    pieces.extend(manin_path(p, alpha.apply(m), beta.apply(m)));
                }
            }
            OpKind::Fricke => {
                let w = [[0, -1], [p as i64, 0]];
                pieces = manin_path(p, alpha.apply(w), beta.apply(w));
            }
            OpKind::Star => {
                pieces = manin_path(p, alpha.neg(), beta.neg());
            }
        }
        for (raw_idx, coeff) in pieces {
            let cq = q_int(coeff);
            for (j, c) in &space.proj[raw_idx] {
                let add = c * &cq;
                mat[(*j, col)] += add;
            }
        }
    }
    mat
}

/// An exact operator matrix acting on the cuspidal basis.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub label: String,
    pub mat: QMat,
}

fn restrict_to_cuspidal(space: &ManinSpace, qop: &QMat) -> Result<QMat, ModsymError> {
    let dim = space.cuspidal.len();
    let mut out = QMat::zeros(dim, dim);
    for i in 0..dim {
        let image = qop.mul_vec(&space.cuspidal[i]);
        let coords = space.cuspidal_coords(&image)?;
        for (r, c) in coords.into_iter().enumerate() {
            out[(r, i)] = c;
        }
    }
    Ok(out)
}

/// Hecke operator T_ℓ on the cuspidal subspace, ℓ prime different from p.
pub fn hecke_matrix(space: &ManinSpace, ell: u64) -> Result<OperatorMatrix, ModsymError> {
    if !is_prime(ell) || ell == space.p {
        return Err(ModsymError::BadPrime(ell));
    }
    let qop = op_on_quotient(space, OpKind::Hecke(ell));
    Ok(OperatorMatrix {
        label: format!("T_{ell}"),
        mat: restrict_to_cuspidal(space, &qop)?,
    })
}

/// The Atkin-Lehner involution on the cuspidal subspace with the dimensions
/// of its eigenspaces, halved to abelian-variety dimensions.
#[derive(Debug, Clone)]
pub struct AtkinLehner {
    pub op: OperatorMatrix,
    pub dim_plus: u64,
    pub dim_minus: u64,
}

pub fn atkin_lehner(space: &ManinSpace) -> Result<AtkinLehner, ModsymError> {
    let qop = op_on_quotient(space, OpKind::Fricke);
    let mat = restrict_to_cuspidal(space, &qop)?;
    let dim = space.cuspidal.len();
    let id = QMat::identity(dim);
    if !mat.mul(&mat).sub(&id).is_zero() {
        return Err(ModsymError::Internal("Fricke action does not square to 1".into()));
    }
    let plus = dim - mat.sub(&id).rank(); // dim ker(w − 1)
    let minus_mat = {
        let mut m = mat.clone();
        for i in 0..dim {
            m[(i, i)] += Q::one();
        }
        m
    };
    let minus = dim - minus_mat.rank(); // dim ker(w + 1)
    if plus + minus != dim || plus % 2 != 0 || minus % 2 != 0 {
        return Err(ModsymError::Internal(
            "Fricke eigenspace dimensions are not even and complementary".into(),
        ));
    }
    Ok(AtkinLehner {
        op: OperatorMatrix {
            label: "w_p".into(),
            mat,
        },
        dim_plus: (plus / 2) as u64,
        dim_minus: (minus / 2) as u64,
    })
}

/// Star involution (complex conjugation) on the cuspidal subspace.
pub fn star_matrix(space: &ManinSpace) -> Result<OperatorMatrix, ModsymError> {
    let qop = op_on_quotient(space, OpKind::Star);
    Ok(OperatorMatrix {
        label: "star".into(),
        mat: restrict_to_cuspidal(space, &qop)?,
    })
}

/// Sturm bound for weight-2 forms on Γ₀(p): ⌈(p+1)/6⌉.
pub fn sturm_bound(p: u64) -> u64 {
    (p + 1).div_ceil(6)
}

/// The primes up to the Sturm bound, the default Hecke generator set.
pub fn sturm_primes(p: u64) -> Vec<u64> {
    rat::primes_up_to(sturm_bound(p))
}

/// Cuspidal projection of the winding class {0,∞}: subtract the unique
/// Eisenstein multiple matching its boundary. ker(T₂ − 3) is exactly the
/// Eisenstein line (cusp forms cannot have a₂ = 3), so the projection is a
/// pure linear-algebra step and lands in the cuspidal subspace exactly.
pub fn winding_cuspidal_projection(space: &ManinSpace) -> Result<Vec<Q>, ModsymError> {
    let e = space.winding_class();
    let t2 = op_on_quotient(space, OpKind::Hecke(2));
    let mut shifted = t2;
    for i in 0..space.q_dim {
        shifted[(i, i)] -= q_int(3);
    }
    let kernel = shifted.kernel_basis();
    if kernel.len() != 1 {
        return Err(ModsymError::Internal(format!(
            "Eisenstein line has dimension {} at p = {}",
            kernel.len(),
            space.p
        )));
    }
    let u = &kernel[0];
    let (be_inf, be_zero) = space.boundary_of(&e);
    let (bu_inf, bu_zero) = space.boundary_of(u);
    if bu_inf.is_zero() && bu_zero.is_zero() {
        return Err(ModsymError::Internal(
            "Eisenstein vector has trivial boundary".into(),
        ));
    }
    let scale = if !bu_inf.is_zero() {
        &be_inf / &bu_inf
    } else {
        &be_zero / &bu_zero
    };
    if be_inf != &scale * &bu_inf || be_zero != &scale * &bu_zero {
        return Err(ModsymError::Internal(
            "winding boundary is not proportional to the Eisenstein boundary".into(),
        ));
    }
    let projected: Vec<Q> = e
        .iter()
        .zip(u)
        .map(|(a, b)| a - &scale * b)
        .collect();
    let (pi, pz) = space.boundary_of(&projected);
    if !pi.is_zero() || !pz.is_zero() {
        return Err(ModsymError::Internal(
            "cuspidal projection has nonzero boundary".into(),
        ));
    }
    space.cuspidal_coords(&projected)?; // exact membership (Manin-Drinfeld)
    Ok(projected)
}

/// Dimension of the winding quotient: the rank of the Hecke module
/// generated by the cuspidal projection of {0,∞}, saturated by iterating
/// the T_ℓ for ℓ up to the Sturm bound.
pub fn winding_dimension(space: &ManinSpace, hecke_primes: &[u64]) -> Result<u64, ModsymError> {
    let bound = sturm_bound(space.p);
    for required in rat::primes_up_to(bound) {
        if !hecke_primes.contains(&required) {
            return Err(ModsymError::SturmNotReached {
                bound,
                missing: required,
            });
        }
    }
    for &ell in hecke_primes {
        if !is_prime(ell) || ell == space.p {
            return Err(ModsymError::BadPrime(ell));
        }
    }
    let seed = winding_cuspidal_projection(space)?;
    if seed.iter().all(|x| x.is_zero()) {
        return Ok(0);
    }
    let ops: Vec<QMat> = hecke_primes
        .iter()
        .map(|&ell| op_on_quotient(space, OpKind::Hecke(ell)))
        .collect();
    let mut span = Echelon::new();
    span.insert(seed.clone());
    let mut worklist = vec![seed];
    while let Some(v) = worklist.pop() {
        for op in &ops {
            let w = op.mul_vec(&v);
            if span.insert(w.clone()) {
                worklist.push(w);
            }
        }
    }
    Ok(span.rank() as u64)
}

/// One row of the winding survey.
#[derive(Debug, Clone, Serialize)]
pub struct WindingReport {
    pub p: u64,
    pub genus: u64,
    pub dim_plus: u64,
    pub dim_minus: u64,
    pub dim_winding: u64,
    #[serde(with = "crate::rat::qserde")]
    pub ratio: Q,
    pub brumer_weak: bool,
}

pub fn winding_report(p: u64) -> Result<WindingReport, ModsymError> {
    let space = build_manin_space(p)?;
    let al = atkin_lehner(&space)?;
    let dim_winding = winding_dimension(&space, &sturm_primes(p))?;
    if dim_winding > al.dim_minus {
        return Err(ModsymError::Internal(format!(
            "winding dimension {dim_winding} exceeds the minus part {} at p = {p}",
            al.dim_minus
        )));
    }
    let g = space.genus;
    let ratio = if g == 0 {
        Q::zero()
    } else {
        Q::new(BigInt::from(dim_winding), BigInt::from(g))
    };
    let brumer_weak = dim_winding >= 1 && heights::brumer_gate(g, dim_winding).brumer_weak;
    Ok(WindingReport {
        p,
        genus: g,
        dim_plus: al.dim_plus,
        dim_minus: al.dim_minus,
        dim_winding,
        ratio,
        brumer_weak,
    })
}

/// Survey the primes of [lo, hi] (only p > 17 are scanned), in order.
pub fn brumer_scan(lo: u64, hi: u64) -> Result<Vec<WindingReport>, ModsymError> {
    rat::primes_in(lo.max(19), hi)
        .into_iter()
        .map(winding_report)
        .collect()
}

/// Same survey with the primes distributed over `jobs` worker threads;
/// the output order is by p regardless of completion order.
pub fn brumer_scan_parallel(lo: u64, hi: u64, jobs: usize) -> Result<Vec<WindingReport>, ModsymError> {
    use rayon::prelude::*;
    let primes = rat::primes_in(lo.max(19), hi);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| ModsymError::Internal(format!("thread pool: {e}")))?;
    pool.install(|| {
        primes
            .par_iter()
            .map(|&p| winding_report(p))
            .collect::<Result<Vec<_>, _>>()
    })
}

/// CSV rendering, one row per prime:
/// `p,g,dim_plus,dim_minus,dim_Je,ratio,brumer_weak`.
pub fn reports_to_csv(reports: &[WindingReport]) -> String {
    let mut out = String::from("p,g,dim_plus,dim_minus,dim_Je,ratio,brumer_weak\n");
    for r in reports {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.p,
            r.genus,
            r.dim_plus,
            r.dim_minus,
            r.dim_winding,
            rat::format_q(&r.ratio),
            r.brumer_weak
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn space_dimensions() {
        let s11 = build_manin_space(11).unwrap();
        assert_eq!(s11.raw_symbol_count(), 12);
        assert_eq!(s11.cuspidal_dimension(), 2);
        assert_eq!(build_manin_space(23).unwrap().cuspidal_dimension(), 4);
        assert_eq!(build_manin_space(37).unwrap().cuspidal_dimension(), 4);
        assert!(matches!(build_manin_space(12), Err(ModsymError::NonPrime(12))));
        assert!(matches!(build_manin_space(3), Err(ModsymError::NonPrime(3))));
    }

    #[test]
    fn cuspidal_dimension_is_twice_genus() {
        for p in rat::primes_in(5, 150) {
            let space = build_manin_space(p).unwrap();
            assert_eq!(
                space.cuspidal_dimension() as u64,
                2 * space.genus,
                "p = {p}"
            );
        }
    }

    #[test]
    fn hecke_eigenvalue_at_11() {
        // the unique newform orbit at p = 11 has a₂ = −2 (point count on
        // the rank-zero elliptic curve of conductor 11 over F₂)
        let space = build_manin_space(11).unwrap();
        let t2 = hecke_matrix(&space, 2).unwrap();
        let expect = {
            let mut m = QMat::identity(2);
            m[(0, 0)] = q_int(-2);
            m[(1, 1)] = q_int(-2);
            m
        };
        assert_eq!(t2.mat, expect);
    }

    #[test]
    fn hecke_commutation_and_integral_trace() {
        for p in [11u64, 23, 37] {
            let space = build_manin_space(p).unwrap();
            let t2 = hecke_matrix(&space, 2).unwrap().mat;
            let t3 = hecke_matrix(&space, 3).unwrap().mat;
            assert_eq!(t2.mul(&t3), t3.mul(&t2), "commutation at p = {p}");
            let trace: Q = (0..t2.nrows).map(|i| t2[(i, i)].clone()).sum();
            assert!(trace.is_integer(), "trace integrality at p = {p}");
            let w = atkin_lehner(&space).unwrap().op.mat;
            assert_eq!(t2.mul(&w), w.mul(&t2), "Fricke commutation at p = {p}");
        }
        let space = build_manin_space(11).unwrap();
        assert!(matches!(hecke_matrix(&space, 11), Err(ModsymError::BadPrime(11))));
        assert!(matches!(hecke_matrix(&space, 4), Err(ModsymError::BadPrime(4))));
    }

    #[test]
    fn atkin_lehner_dimensions() {
        let expected = [(11u64, (0u64, 1u64)), (23, (0, 2)), (37, (1, 1))];
        for (p, (plus, minus)) in expected {
            let space = build_manin_space(p).unwrap();
            let al = atkin_lehner(&space).unwrap();
            assert_eq!((al.dim_plus, al.dim_minus), (plus, minus), "p = {p}");
            assert_eq!(al.dim_plus + al.dim_minus, space.genus);
        }
        // the quotient curve X₀⁺(p) has genus 0 exactly at the primes
        // dividing the Monster order (Ogg's list); the plus part vanishes
        for p in [41u64, 47, 59, 71] {
            let space = build_manin_space(p).unwrap();
            let al = atkin_lehner(&space).unwrap();
            assert_eq!(al.dim_plus, 0, "p = {p} is an Ogg prime");
            assert_eq!(al.dim_minus, space.genus);
        }
        // first prime past the list: X₀⁺(67) has genus 2
        let al67 = atkin_lehner(&build_manin_space(67).unwrap()).unwrap();
        assert_eq!((al67.dim_plus, al67.dim_minus), (2, 3));
    }

    #[test]
    fn star_fixes_winding_class() {
        let space = build_manin_space(23).unwrap();
        let star = op_on_quotient(&space, OpKind::Star);
        let e = space.winding_class();
        assert_eq!(star.mul_vec(&e), e);
        // star is an involution on the cuspidal space and commutes with
        // the Hecke action
        let s = star_matrix(&space).unwrap().mat;
        assert!(s.mul(&s).sub(&QMat::identity(s.nrows)).is_zero());
        let t2 = hecke_matrix(&space, 2).unwrap().mat;
        assert_eq!(s.mul(&t2), t2.mul(&s));
    }

    #[test]
    fn fricke_negates_winding_class() {
        let space = build_manin_space(23).unwrap();
        let w = op_on_quotient(&space, OpKind::Fricke);
        let e = space.winding_class();
        let we = w.mul_vec(&e);
        let neg: Vec<Q> = e.iter().map(|x| -x.clone()).collect();
        assert_eq!(we, neg);
    }

    #[test]
    fn winding_boundary_and_projection() {
        let space = build_manin_space(23).unwrap();
        let e = space.winding_class();
        // boundary of {0,∞} is [∞] − [0]
        assert_eq!(space.boundary_of(&e), (Q::one(), -Q::one()));
        let proj = winding_cuspidal_projection(&space).unwrap();
        assert_eq!(space.boundary_of(&proj), (Q::zero(), Q::zero()));
        assert!(!proj.iter().all(|x| x.is_zero()));
    }

    #[test]
    fn winding_dimensions_known_values() {
        // 11: one rank-zero elliptic orbit; 19: likewise; 23: a simple
        // two-dimensional abelian variety with nonvanishing central value;
        // 37: two elliptic orbits, exactly one with nonvanishing value
        for (p, expect) in [(11u64, 1u64), (19, 1), (23, 2), (37, 1)] {
            let space = build_manin_space(p).unwrap();
            let dim = winding_dimension(&space, &sturm_primes(p)).unwrap();
            assert_eq!(dim, expect, "p = {p}");
        }
    }

    #[test]
    fn winding_dimension_order_independent() {
        let space = build_manin_space(37).unwrap();
        let mut primes = sturm_primes(37);
        primes.reverse();
        assert_eq!(
            winding_dimension(&space, &primes).unwrap(),
            winding_dimension(&space, &sturm_primes(37)).unwrap()
        );
        // missing Sturm coverage is reported
        assert!(matches!(
            winding_dimension(&space, &[2, 3]),
            Err(ModsymError::SturmNotReached { .. })
        ));
    }

    #[test]
    fn winding_reports() {
        let r23 = winding_report(23).unwrap();
        assert_eq!(r23.genus, 2);
        assert_eq!(r23.dim_winding, 2);
        assert_eq!(r23.ratio, Q::one());
        assert!(r23.brumer_weak);
        let r37 = winding_report(37).unwrap();
        assert_eq!((r37.dim_minus, r37.dim_winding), (1, 1));
        assert!(!r37.brumer_weak); // 1 < 2/3·... the known small exception
    }

    #[test]
    fn rank_two_form_excluded_at_389() {
        // the first modular form of analytic rank two lives at level 389,
        // in the minus part; its vanishing central value must keep it out
        // of the winding module, and it is the only vanishing one there
        let r = winding_report(389).unwrap();
        assert_eq!((r.genus, r.dim_plus, r.dim_minus), (32, 11, 21));
        assert_eq!(r.dim_winding, r.dim_minus - 1);
    }

    #[test]
    fn scan_produces_ordered_csv() {
        let reports = brumer_scan(19, 47).unwrap();
        let ps: Vec<u64> = reports.iter().map(|r| r.p).collect();
        assert_eq!(ps, vec![19, 23, 29, 31, 37, 41, 43, 47]);
        for r in &reports {
            assert!(r.dim_winding <= r.dim_minus);
        }
        let csv = reports_to_csv(&reports);
        assert!(csv.starts_with("p,g,dim_plus,dim_minus,dim_Je,ratio,brumer_weak\n"));
        assert_eq!(csv.lines().count(), reports.len() + 1);
        // parallel scan agrees and keeps the order
        let par = brumer_scan_parallel(19, 47, 3).unwrap();
        assert_eq!(reports_to_csv(&par), csv);
    }
}
