//! Ordered sets of evaluable functions: monomials with an optional power of
//! (x^q + x) in the denominator and factors of Tamo-Barg good polynomials.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::curves::CurvePointSet;
use crate::error::{Error, Result};
use crate::gf::{Elem, Field, FieldRef};
use crate::matrix::Matrix;

/// Variables a term may use. `U` and `V` are the Suzuki functions
/// u = x^{2q0+1} + y^{2q0} and v = x y^{2q0} + u^{2q0}, evaluated from x and y.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    X,
    Y,
    Z,
    T,
    U,
    V,
}

pub const ALL_VARS: [Var; 6] = [Var::X, Var::Y, Var::Z, Var::T, Var::U, Var::V];

impl Var {
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::Z => "z",
            Var::T => "t",
            Var::U => "u",
            Var::V => "v",
        }
    }

    pub fn parse(s: &str) -> Option<Var> {
        ALL_VARS
            .iter()
            .copied()
            .find(|v| v.name() == s.to_ascii_lowercase())
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GoodKind {
    /// g = X^{r+1}, parts are cosets of the order-(r+1) subgroup of F*.
    Power,
    /// g = prod_{h in H} (X - h), parts are additive cosets of H.
    Subspace,
    /// g = X + X^p + ... + X^{p^{m-1}}, parts are the trace fibers.
    Trace,
}

/// A polynomial constant on every part of a partition of (a subset of) the field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoodPolynomial {
    pub kind: GoodKind,
    pub r: u32,
    /// Sparse coefficients as (exponent, coefficient), increasing exponents.
    pub coeffs: Vec<(u64, Elem)>,
    pub parts: Vec<Vec<Elem>>,
}

impl GoodPolynomial {
    pub fn degree(&self) -> u64 {
        self.coeffs.last().map_or(0, |&(e, _)| e)
    }

    pub fn eval(&self, f: &Field, x: Elem) -> Elem {
        self.coeffs
            .iter()
            .fold(0, |acc, &(e, c)| f.add(acc, f.mul(c, f.pow(x, e))))
    }

    /// The part containing `x`, if any.
    pub fn part_of(&self, x: Elem) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&x))
    }

    /// Union of the first `count` parts, in part order.
    pub fn support(&self, count: usize) -> Vec<Elem> {
        self.parts.iter().take(count).flatten().copied().collect()
    }

    fn verify(&self, f: &Field) -> Result<()> {
        let mut seen = HashSet::new();
        for part in &self.parts {
            let v = self.eval(f, part[0]);
            if part.iter().any(|&x| self.eval(f, x) != v) {
                return Err(Error::BadPartition(
                    "polynomial not constant on a part".into(),
                ));
            }
            if part.iter().any(|&x| !seen.insert(x)) {
                return Err(Error::BadPartition("parts overlap".into()));
            }
        }
        Ok(())
    }

    /// Additive cosets of the F_p-span of `basis`, with g the subspace polynomial.
    pub fn subspace(f: &Field, basis: &[Elem]) -> Result<GoodPolynomial> {
        let mut h: Vec<Elem> = vec![0];
        for &b in basis {
            let mut next = h.clone();
            for k in 1..f.p() {
                let kb = f.mul(f.reduce_int(k as u64), b);
                next.extend(h.iter().map(|&x| f.add(x, kb)));
            }
            h = next;
        }
        let mut uniq = h.clone();
        uniq.sort_unstable();
        uniq.dedup();
        if uniq.len() != h.len() {
            return Err(Error::BadPartition(
                "subspace basis is linearly dependent".into(),
            ));
        }
        // prod (X - h), dense then sparsified
        let mut poly: Vec<Elem> = vec![1];
        for &root in &h {
            let mut next = vec![0; poly.len() + 1];
            for (i, &c) in poly.iter().enumerate() {
                next[i + 1] = f.add(next[i + 1], c);
                next[i] = f.sub(next[i], f.mul(c, root));
            }
            poly = next;
        }
        let coeffs = poly
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(e, &c)| (e as u64, c))
            .collect();
        let mut parts: Vec<Vec<Elem>> = Vec::new();
        let mut covered = vec![false; f.order() as usize];
        for a in f.elements() {
            if covered[a as usize] {
                continue;
            }
            let mut part: Vec<Elem> = h.iter().map(|&x| f.add(a, x)).collect();
            part.sort_by_key(|&x| f.rank_of(x));
            for &x in &part {
                covered[x as usize] = true;
            }
            parts.push(part);
        }
        let gp = GoodPolynomial {
            kind: GoodKind::Subspace,
            r: h.len() as u32 - 1,
            coeffs,
            parts,
        };
        gp.verify(f)?;
        Ok(gp)
    }
}

/// Good polynomial and partition of the requested kind with locality `r`.
pub fn tb_partition(f: &Field, kind: GoodKind, r: u32) -> Result<GoodPolynomial> {
    let q = f.order();
    let gp = match kind {
        GoodKind::Power => {
            if r == 0 || !(q - 1).is_multiple_of(r + 1) {
                return Err(Error::BadPartition(format!(
                    "r+1 = {} does not divide |F*| = {}",
                    r + 1,
                    q - 1
                )));
            }
            let mut covered = vec![false; q as usize];
            let mut parts = Vec::new();
            let subgroup: Vec<Elem> = f
                .elements()
                .filter(|&e| e != 0 && f.pow(e, (r + 1) as u64) == 1)
                .collect();
            debug_assert_eq!(subgroup.len() as u32, r + 1);
            for a in f.elements().filter(|&e| e != 0) {
                if covered[a as usize] {
                    continue;
                }
                let mut part: Vec<Elem> = subgroup.iter().map(|&h| f.mul(a, h)).collect();
                part.sort_by_key(|&x| f.rank_of(x));
                for &x in &part {
                    covered[x as usize] = true;
                }
                parts.push(part);
            }
            GoodPolynomial {
                kind,
                r,
                coeffs: vec![(r as u64 + 1, 1)],
                parts,
            }
        }
        GoodKind::Subspace => {
            let d = (1..=f.m())
                .find(|&d| f.p().pow(d) == r + 1)
                .ok_or_else(|| {
                    Error::BadPartition(format!(
                        "r+1 = {} is not a power of {} up to |F|",
                        r + 1,
                        f.p()
                    ))
                })?;
            let t = f.generator_t();
            let basis: Vec<Elem> = (0..d).map(|i| f.pow(t, i as u64)).collect();
            return GoodPolynomial::subspace(f, &basis);
        }
        GoodKind::Trace => {
            if f.m() < 2 {
                return Err(Error::BadPartition("trace partition needs m >= 2".into()));
            }
            let natural = f.p().pow(f.m() - 1) - 1;
            if r != natural {
                return Err(Error::BadPartition(format!(
                    "trace partition of GF({q}) has locality {natural}, not {r}"
                )));
            }
            let coeffs: Vec<(u64, Elem)> = (0..f.m()).map(|i| ((f.p() as u64).pow(i), 1)).collect();
            let mut gp = GoodPolynomial {
                kind,
                r,
                coeffs,
                parts: vec![Vec::new(); f.p() as usize],
            };
            for a in f.elements() {
                let v = gp.eval(f, a);
                gp.parts[v as usize].push(a);
            }
            gp
        }
    };
    gp.verify(f)?;
    Ok(gp)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GoodFactor {
    pub var: Var,
    /// Index into the owning set's `polys`.
    pub poly: usize,
    pub exp: u32,
}

/// x_1^{e_1} ... * g(..)^{..} / (x^q + x)^{denom_exp}.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FunctionTerm {
    pub exps: [u32; 6],
    pub denom_exp: u32,
    pub good: Vec<GoodFactor>,
}

impl FunctionTerm {
    pub fn monomial(pairs: &[(Var, u32)]) -> FunctionTerm {
        let mut exps = [0; 6];
        for &(v, e) in pairs {
            exps[v.index()] += e;
        }
        FunctionTerm {
            exps,
            denom_exp: 0,
            good: Vec::new(),
        }
    }

    pub fn one() -> FunctionTerm {
        FunctionTerm::monomial(&[])
    }

    pub fn exp(&self, v: Var) -> u32 {
        self.exps[v.index()]
    }

    pub fn with_exp(mut self, v: Var, e: u32) -> FunctionTerm {
        self.exps[v.index()] = e;
        self
    }

    pub fn times(&self, other: &FunctionTerm) -> FunctionTerm {
        let mut exps = self.exps;
        for (a, b) in exps.iter_mut().zip(other.exps) {
            *a += b;
        }
        let mut good = self.good.clone();
        good.extend(other.good.iter().copied());
        FunctionTerm {
            exps,
            denom_exp: self.denom_exp + other.denom_exp,
            good,
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut out: Vec<Var> = ALL_VARS
            .iter()
            .copied()
            .filter(|v| self.exp(*v) > 0)
            .collect();
        out.extend(self.good.iter().map(|g| g.var));
        out.sort();
        out.dedup();
        out
    }

    /// Degree in `v` as a univariate polynomial (good factors expanded).
    pub fn degree_in(&self, v: Var, polys: &[GoodPolynomial]) -> u64 {
        self.exp(v) as u64
            + self
                .good
                .iter()
                .filter(|g| g.var == v)
                .map(|g| polys[g.poly].degree() * g.exp as u64)
                .sum::<u64>()
    }
}

/// An ordered, duplicate-free list of terms with the context needed to evaluate them.
#[derive(Debug, Clone)]
pub struct FunctionSet {
    pub terms: Vec<FunctionTerm>,
    pub polys: Vec<GoodPolynomial>,
    pub provenance: String,
    /// The q in the denominator x^q + x.
    pub q: u64,
    /// The q0 used to expand u and v.
    pub q0: u64,
}

impl FunctionSet {
    pub fn new(provenance: impl Into<String>, q: u64, q0: u64) -> FunctionSet {
        FunctionSet {
            terms: Vec::new(),
            polys: Vec::new(),
            provenance: provenance.into(),
            q,
            q0,
        }
    }

    pub fn from_terms(provenance: impl Into<String>, terms: Vec<FunctionTerm>) -> FunctionSet {
        let mut fs = FunctionSet::new(provenance, 0, 0);
        for t in terms {
            fs.push(t);
        }
        fs
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Appends unless an identical term is present; returns whether it was added.
    pub fn push(&mut self, t: FunctionTerm) -> bool {
        if self.terms.contains(&t) {
            return false;
        }
        self.terms.push(t);
        true
    }

    pub fn add_poly(&mut self, gp: GoodPolynomial) -> usize {
        if let Some(i) = self.polys.iter().position(|p| *p == gp) {
            return i;
        }
        self.polys.push(gp);
        self.polys.len() - 1
    }

    /// Highest degree of `v` over all terms.
    pub fn max_degree(&self, v: Var) -> u64 {
        self.terms
            .iter()
            .map(|t| t.degree_in(v, &self.polys))
            .max()
            .unwrap_or(0)
    }

    /// All products f * g for f in self and g in other, with disjoint variables.
    pub fn tensor(&self, other: &FunctionSet) -> Result<FunctionSet> {
        let mine: HashSet<Var> = self.terms.iter().flat_map(|t| t.vars()).collect();
        if other
            .terms
            .iter()
            .flat_map(|t| t.vars())
            .any(|v| mine.contains(&v))
        {
            return Err(Error::BadCurveParams(
                "tensor factors share a variable".into(),
            ));
        }
        let mut out = FunctionSet::new(
            format!("({}) x ({})", self.provenance, other.provenance),
            self.q.max(other.q),
            self.q0.max(other.q0),
        );
        out.polys = self.polys.clone();
        let offset = out.polys.len();
        out.polys.extend(other.polys.iter().cloned());
        for a in &self.terms {
            for b in &other.terms {
                let mut b = b.clone();
                for g in &mut b.good {
                    g.poly += offset;
                }
                out.push(a.times(&b));
            }
        }
        Ok(out)
    }

    /// Replaces variable `from` with `to` in every term.
    pub fn rename(&self, from: Var, to: Var) -> FunctionSet {
        let mut out = self.clone();
        for t in &mut out.terms {
            let e = t.exps[from.index()];
            t.exps[from.index()] = 0;
            t.exps[to.index()] += e;
            for g in &mut t.good {
                if g.var == from {
                    g.var = to;
                }
            }
        }
        out
    }

    /// Evaluation matrix: one row per term, one column per point.
    pub fn evaluate(&self, points: &CurvePointSet) -> Result<Matrix> {
        let f: &FieldRef = &points.field;
        let n = points.len();
        let mut used = [false; 6];
        let mut needs_denom = false;
        for t in &self.terms {
            for v in t.vars() {
                used[v.index()] = true;
            }
            needs_denom |= t.denom_exp > 0;
        }
        let xi = points.coord_index(Var::X);
        let yi = points.coord_index(Var::Y);
        let need_xy = used[Var::U.index()] || used[Var::V.index()] || needs_denom;
        if need_xy && (xi.is_none() || (yi.is_none() && !needs_denom)) {
            return Err(Error::MissingConstraint(
                "x/y coordinates for u, v or denominators".into(),
            ));
        }
        // per-variable value columns
        let mut vals: Vec<Vec<Elem>> = vec![Vec::new(); 6];
        for v in [Var::X, Var::Y, Var::Z, Var::T] {
            if used[v.index()] {
                let c = points.coord_index(v).ok_or_else(|| {
                    Error::MissingConstraint(format!("point set has no coordinate {v}"))
                })?;
                vals[v.index()] = points.iter().map(|p| p[c]).collect();
            }
        }
        if used[Var::U.index()] || used[Var::V.index()] {
            let (xi, yi) = (xi.unwrap(), yi.unwrap());
            let e = 2 * self.q0;
            let us: Vec<Elem> = points
                .iter()
                .map(|p| f.add(f.pow(p[xi], e + 1), f.pow(p[yi], e)))
                .collect();
            vals[Var::V.index()] = points
                .iter()
                .zip(&us)
                .map(|(p, &u)| f.add(f.mul(p[xi], f.pow(p[yi], e)), f.pow(u, e)))
                .collect();
            vals[Var::U.index()] = us;
        }
        let mut dinv = Vec::new();
        if needs_denom {
            let xi = xi.unwrap();
            for (i, p) in points.iter().enumerate() {
                let d = crate::curves::kummer_rhs(f, p[xi], self.q);
                dinv.push(f.inv(d).map_err(|_| Error::PoleAtPoint(i))?);
            }
        }
        // good-polynomial value tables indexed by field element
        let gtables: Vec<Vec<Elem>> = self
            .polys
            .iter()
            .map(|gp| (0..f.order()).map(|x| gp.eval(f, x)).collect())
            .collect();
        let mut data = vec![0u16; self.terms.len() * n];
        data.par_chunks_mut(n.max(1))
            .zip(self.terms.par_iter())
            .for_each(|(row, t)| {
                let active: Vec<(usize, u64)> = (0..6)
                    .filter(|&i| t.exps[i] > 0)
                    .map(|i| (i, t.exps[i] as u64))
                    .collect();
                for (j, slot) in row.iter_mut().enumerate() {
                    let mut acc: Elem = 1;
                    for &(i, e) in &active {
                        acc = f.mul(acc, f.pow(vals[i][j], e));
                    }
                    for g in &t.good {
                        let x = vals[g.var.index()][j];
                        acc = f.mul(acc, f.pow(gtables[g.poly][x as usize], g.exp as u64));
                    }
                    if t.denom_exp > 0 {
                        acc = f.mul(acc, f.pow(dinv[j], t.denom_exp as u64));
                    }
                    *slot = acc as u16;
                }
            });
        Ok(Matrix::from_flat(self.terms.len(), n, data))
    }
}

fn suzuki_q0(q: u64) -> Result<u64> {
    Ok(crate::curves::CurveParams::suzuki(q)?.q0)
}

/// Terms x^a y^b u^c v^d / (x^q+x)^e with pole order at infinity and at each
/// zero of x^q + x bounded by alpha.
pub fn eid_basis(q: u64, alpha: u32) -> Result<FunctionSet> {
    let q0 = suzuki_q0(q)?;
    let mut fs = FunctionSet::new(format!("eid_basis(q={q}, alpha={alpha})"), q, q0);
    let alpha = alpha as u64;
    for e in 0..=alpha {
        for a in 0..q {
            for b in 0..2 {
                for c in 0..q0 {
                    for d in 0..q0 {
                        let w = a * q + b * (q + q0) + c * (q + 2 * q0) + d * (q + 2 * q0 + 1);
                        if w <= alpha + e * q * q {
                            let mut t = FunctionTerm::monomial(&[
                                (Var::X, a as u32),
                                (Var::Y, b as u32),
                                (Var::U, c as u32),
                                (Var::V, d as u32),
                            ]);
                            t.denom_exp = e as u32;
                            fs.push(t);
                        }
                    }
                }
            }
        }
    }
    Ok(fs)
}

/// Closed-form size of [`eid_basis`].
pub fn eid_basis_size(q: u64, q0: u64, alpha: u64) -> u64 {
    alpha * (q * q + 1) - q0 * (q - 1) + 1
}

/// Degree of the divisor bounding the poles of the cover code's functions.
pub fn suzuki_tilde_g_degree(q: u64, q0: u64, alpha: u64) -> u64 {
    let m = q - 2 * q0 + 1;
    m * alpha + (m - 2) * q * q + m * alpha * q * q
}

/// { f t^i : f in the eid basis, 0 <= i <= m - 2 }.
pub fn suzuki_tilde_v(q: u64, alpha: u32) -> Result<FunctionSet> {
    let q0 = suzuki_q0(q)?;
    let m = q - 2 * q0 + 1;
    let deg = suzuki_tilde_g_degree(q, q0, alpha as u64);
    let s_size = crate::curves::CurveParams::suzuki(q)?.point_count.unwrap() as u64;
    if deg >= s_size {
        return Err(Error::DegreeTooLarge { deg, bound: s_size });
    }
    let base = eid_basis(q, alpha)?;
    let mut fs = FunctionSet::new(format!("suzuki_tilde_V(q={q}, alpha={alpha})"), q, q0);
    for f in &base.terms {
        for i in 0..=(m - 2) {
            fs.push(f.clone().with_exp(Var::T, i as u32));
        }
    }
    Ok(fs)
}

/// { t^i x^j y^k : q i + m j <= alpha, j < q, k <= q - 2 }.
pub fn cm_projection_v(q: u64, alpha: u32) -> Result<FunctionSet> {
    let q0 = suzuki_q0(q)?;
    let m = q - 2 * q0 + 1;
    let alpha = alpha as u64;
    let mut fs = FunctionSet::new(format!("cm_projection_V(q={q}, alpha={alpha})"), q, q0);
    for i in 0..=alpha / q {
        for j in 0..q {
            if q * i + m * j > alpha {
                continue;
            }
            for k in 0..=(q - 2) {
                fs.push(FunctionTerm::monomial(&[
                    (Var::T, i as u32),
                    (Var::X, j as u32),
                    (Var::Y, k as u32),
                ]));
            }
        }
    }
    Ok(fs)
}

/// { x^a y^i t^j : a <= alpha, i <= q - 2, j <= m - 2 }.
pub fn fiber_product_v(q: u64, alpha: u32) -> Result<FunctionSet> {
    let q0 = suzuki_q0(q)?;
    let m = q - 2 * q0 + 1;
    let mut fs = FunctionSet::new(format!("fiber_product_V(q={q}, alpha={alpha})"), q, q0);
    for a in 0..=alpha {
        for i in 0..=(q - 2) {
            for j in 0..=(m - 2) {
                fs.push(FunctionTerm::monomial(&[
                    (Var::X, a),
                    (Var::Y, i as u32),
                    (Var::T, j as u32),
                ]));
            }
        }
    }
    Ok(fs)
}

/// Hermitian monomials X^i Y^j with i q + j (q+1) <= s, i <= q^2 - 2, j <= q - 1.
pub fn hermitian_m(q: u64, s: u64) -> FunctionSet {
    let mut fs = FunctionSet::new(format!("hermitian_M(q={q}, s={s})"), q, 0);
    for i in 0..=(q * q - 2) {
        for j in 0..q {
            if i * q + j * (q + 1) <= s {
                fs.push(FunctionTerm::monomial(&[
                    (Var::X, i as u32),
                    (Var::Y, j as u32),
                ]));
            }
        }
    }
    fs
}

/// Tamo-Barg functions X^i g(X)^j with 0 <= i <= r, i != s_excluded and
/// i + (r+1) j <= k' - 1.
pub fn tb_functions(
    gp: &GoodPolynomial,
    var: Var,
    k_prime: u64,
    s_excluded: Option<u32>,
) -> FunctionSet {
    let r = gp.r as u64;
    let mut fs = FunctionSet::new(format!("tb(r={r}, k'={k_prime}, s={s_excluded:?})"), 0, 0);
    let pi = fs.add_poly(gp.clone());
    if k_prime == 0 {
        return fs;
    }
    let mut cands: Vec<(u64, u64, u64)> = Vec::new();
    for j in 0..k_prime {
        for i in 0..=r {
            if Some(i as u32) == s_excluded || i + (r + 1) * j > k_prime - 1 {
                continue;
            }
            cands.push((i + gp.degree() * j, i, j));
        }
    }
    cands.sort();
    for (_, i, j) in cands {
        let mut t = FunctionTerm::monomial(&[(var, i as u32)]);
        if j > 0 {
            t.good.push(GoodFactor {
                var,
                poly: pi,
                exp: j as u32,
            });
        }
        fs.push(t);
    }
    fs
}

/// Suzuki affine monomials x^a y^b u^c v^d with
/// a q + b (q+q0) + c (q+2q0) + d (q+2q0+1) <= s.
pub fn suzuki_affine_l(q: u64, s: u64) -> Result<FunctionSet> {
    let q0 = suzuki_q0(q)?;
    let mut fs = FunctionSet::new(format!("suzuki_affine_L(q={q}, s={s})"), q, q0);
    let mut cands = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q0 {
                for d in 0..q0 {
                    let w = a * q + b * (q + q0) + c * (q + 2 * q0) + d * (q + 2 * q0 + 1);
                    if w <= s {
                        cands.push((w, a, b, c, d));
                    }
                }
            }
        }
    }
    cands.sort();
    for (_, a, b, c, d) in cands {
        fs.push(FunctionTerm::monomial(&[
            (Var::X, a as u32),
            (Var::Y, b as u32),
            (Var::U, c as u32),
            (Var::V, d as u32),
        ]));
    }
    Ok(fs)
}

/// Pole orders at infinity of x, y, z on the Ree curve R_q.
pub fn ree_weights(q: u64, q0: u64) -> [u64; 3] {
    [q * q, q * q + q * q0, q * q + 2 * q * q0]
}

/// Ree affine monomials x^a y^b z^c, exponents below q, with weighted degree
/// at most s under the pole orders of x, y and z.
pub fn ree_affine_l(q: u64, s: u64) -> Result<FunctionSet> {
    let q0 = crate::curves::CurveParams::ree(q)?.q0;
    let [wx, wy, wz] = ree_weights(q, q0);
    let mut fs = FunctionSet::new(format!("ree_affine_L(q={q}, s={s})"), q, q0);
    let mut cands = Vec::new();
    for a in 0..q {
        for b in 0..q {
            for c in 0..q {
                let w = a * wx + b * wy + c * wz;
                if w <= s {
                    cands.push((w, a, b, c));
                }
            }
        }
    }
    cands.sort();
    for (_, a, b, c) in cands {
        fs.push(FunctionTerm::monomial(&[
            (Var::X, a as u32),
            (Var::Y, b as u32),
            (Var::Z, c as u32),
        ]));
    }
    Ok(fs)
}

/// Per-variable Tamo-Barg constraint for [`lrc_filter`].
#[derive(Debug, Clone)]
pub struct TbConstraint {
    pub var: Var,
    pub gp: GoodPolynomial,
    pub s_excluded: Option<u32>,
    /// Optional cap on the exponent of g.
    pub max_g_exp: Option<u32>,
}

/// Rewrites each monomial x^e as x^i g(x)^j with e = i + (r+1) j and keeps the
/// terms whose every constrained variable has i != s. Terms with a denominator
/// or with u or v cannot be written this way and are dropped.
pub fn lrc_filter(fs: &FunctionSet, constraints: &[TbConstraint]) -> Result<FunctionSet> {
    let mut out = FunctionSet::new(format!("lrc({})", fs.provenance), fs.q, fs.q0);
    if fs.is_empty() {
        return Ok(out);
    }
    let used: HashSet<Var> = fs.terms.iter().flat_map(|t| t.vars()).collect();
    for v in &used {
        if !constraints.iter().any(|c| c.var == *v) && !matches!(v, Var::U | Var::V) {
            return Err(Error::MissingConstraint(v.to_string()));
        }
    }
    let poly_ids: Vec<usize> = constraints
        .iter()
        .map(|c| out.add_poly(c.gp.clone()))
        .collect();
    'terms: for t in &fs.terms {
        if t.denom_exp > 0 || t.exp(Var::U) > 0 || t.exp(Var::V) > 0 || !t.good.is_empty() {
            continue;
        }
        let mut nt = FunctionTerm::one();
        for (c, &pid) in constraints.iter().zip(&poly_ids) {
            let e = t.exp(c.var) as u64;
            let deg = c.gp.degree();
            let (j, i) = (e / deg, e % deg);
            if i > c.gp.r as u64 || Some(i as u32) == c.s_excluded {
                continue 'terms;
            }
            if c.max_g_exp.is_some_and(|m| j > m as u64) {
                continue 'terms;
            }
            nt.exps[c.var.index()] = i as u32;
            if j > 0 {
                nt.good.push(GoodFactor {
                    var: c.var,
                    poly: pid,
                    exp: j as u32,
                });
            }
        }
        out.push(nt);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eid_basis_contains_constant() {
        let b = eid_basis(8, 1).unwrap();
        assert!(b.terms.contains(&FunctionTerm::one()));
        assert_eq!(b.len(), 52);
    }

    #[test]
    fn eid_basis_weight_cut() {
        // x^7 y has weight 66 > alpha + e q^2 = 65 even with e = 1
        let b = eid_basis(8, 1).unwrap();
        let t = FunctionTerm::monomial(&[(Var::X, 7), (Var::Y, 1)]);
        let mut t1 = t.clone();
        t1.denom_exp = 1;
        assert!(!b.terms.contains(&t));
        assert!(!b.terms.contains(&t1));
        // x^7 has weight 56: excluded without the denominator, included with it
        let x7 = FunctionTerm::monomial(&[(Var::X, 7)]);
        let mut x7d = x7.clone();
        x7d.denom_exp = 1;
        assert!(!b.terms.contains(&x7));
        assert!(b.terms.contains(&x7d));
    }

    #[test]
    fn eid_basis_size_formula() {
        for q in [8u64, 32] {
            let q0 = suzuki_q0(q).unwrap();
            for alpha in 1..=5 {
                let b = eid_basis(q, alpha).unwrap();
                assert_eq!(
                    b.len() as u64,
                    eid_basis_size(q, q0, alpha as u64),
                    "q={q} alpha={alpha}"
                );
            }
        }
    }

    #[test]
    fn tilde_v_size_and_degree_guard() {
        assert_eq!(suzuki_tilde_v(8, 1).unwrap().len(), 208);
        assert_eq!(suzuki_tilde_g_degree(8, 2, 1), 517);
        // 5a + 192 + 320a >= 5824 once a >= 18
        let err = suzuki_tilde_v(8, 18).unwrap_err();
        assert!(matches!(err, Error::DegreeTooLarge { .. }));
        assert!(suzuki_tilde_v(8, 17).is_ok());
    }

    #[test]
    fn cm_projection_examples() {
        assert_eq!(cm_projection_v(8, 0).unwrap().len(), 7);
        let v = cm_projection_v(8, 10).unwrap();
        assert_eq!(v.len(), 28);
        assert!(v
            .terms
            .contains(&FunctionTerm::monomial(&[(Var::T, 1), (Var::Y, 6)])));
        assert!(v.terms.contains(&FunctionTerm::monomial(&[(Var::X, 2)])));
    }

    #[test]
    fn fiber_product_ranges() {
        let v = fiber_product_v(8, 1).unwrap();
        assert_eq!(v.len(), 56);
        assert!(v.terms.contains(&FunctionTerm::monomial(&[
            (Var::X, 1),
            (Var::Y, 6),
            (Var::T, 3)
        ])));
        assert!(!v.terms.contains(&FunctionTerm::monomial(&[
            (Var::X, 1),
            (Var::Y, 7),
            (Var::T, 3)
        ])));
        assert_eq!(fiber_product_v(8, 0).unwrap().len(), 28);
    }

    #[test]
    fn hermitian_m_examples() {
        assert_eq!(hermitian_m(4, 0).len(), 1);
        let m9: HashSet<[u32; 6]> = hermitian_m(4, 9).terms.iter().map(|t| t.exps).collect();
        let want: HashSet<[u32; 6]> = [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1)]
            .iter()
            .map(|&(i, j)| FunctionTerm::monomial(&[(Var::X, i), (Var::Y, j)]).exps)
            .collect();
        assert_eq!(m9, want);
        assert_eq!(hermitian_m(4, 10_000).len(), 60);
    }

    #[test]
    fn trace_partition_of_gf27() {
        let f = Field::of_order(27).unwrap();
        let gp = tb_partition(&f, GoodKind::Trace, 8).unwrap();
        assert_eq!(gp.parts.len(), 3);
        assert!(gp.parts.iter().all(|p| p.len() == 9));
        // A_0 is the kernel of a + a^3 + a^9
        for &a in &gp.parts[0] {
            assert_eq!(f.add(a, f.add(f.pow(a, 3), f.pow(a, 9))), 0);
        }
    }

    #[test]
    fn power_partition_of_gf16() {
        let f = Field::of_order(16).unwrap();
        let gp = tb_partition(&f, GoodKind::Power, 4).unwrap();
        assert_eq!(gp.parts.len(), 3);
        assert!(gp.parts.iter().all(|p| p.len() == 5 && !p.contains(&0)));
        assert!(matches!(
            tb_partition(&f, GoodKind::Power, 3),
            Err(Error::BadPartition(_))
        ));
    }

    #[test]
    fn subspace_partition_of_gf8() {
        let f = Field::of_order(8).unwrap();
        let gp = tb_partition(&f, GoodKind::Subspace, 3).unwrap();
        assert_eq!(gp.parts.len(), 2);
        assert_eq!(gp.degree(), 4);
        assert_eq!(gp.parts[0], vec![0, 2, 1, 3]);
        assert!(tb_partition(&f, GoodKind::Subspace, 2).is_err());
    }

    #[test]
    fn tb_function_counts() {
        let f = Field::of_order(27).unwrap();
        let gp = tb_partition(&f, GoodKind::Trace, 8).unwrap();
        assert_eq!(tb_functions(&gp, Var::X, 1, Some(8)).len(), 1);
        let k9 = tb_functions(&gp, Var::X, 9, Some(8));
        assert_eq!(k9.len(), 8);
        assert_eq!(k9.max_degree(Var::X), 7);
        let k10 = tb_functions(&gp, Var::X, 10, Some(8));
        assert_eq!(k10.len(), 9);
        assert_eq!(k10.max_degree(Var::X), 9);
    }

    #[test]
    fn suzuki_affine_examples() {
        assert_eq!(suzuki_affine_l(8, 0).unwrap().len(), 1);
        let l = suzuki_affine_l(8, 13).unwrap();
        assert_eq!(l.len(), 5);
        for v in [Var::X, Var::Y, Var::U, Var::V] {
            assert!(l.terms.contains(&FunctionTerm::monomial(&[(v, 1)])));
        }
    }

    #[test]
    fn ree_affine_examples() {
        assert_eq!(ree_affine_l(27, 0).unwrap().len(), 1);
        let l = ree_affine_l(27, 891).unwrap();
        assert_eq!(l.len(), 4);
        assert_eq!(ree_affine_l(27, 890).unwrap().len(), 3);
    }

    #[test]
    fn lrc_filter_ree_exponents() {
        let f = Field::of_order(27).unwrap();
        let gp = tb_partition(&f, GoodKind::Trace, 8).unwrap();
        let cons: Vec<TbConstraint> = [Var::X, Var::Y, Var::Z]
            .iter()
            .map(|&var| TbConstraint {
                var,
                gp: gp.clone(),
                s_excluded: Some(8),
                max_g_exp: Some(2),
            })
            .collect();
        let all = ree_affine_l(27, u64::MAX / 4).unwrap();
        let lrc = lrc_filter(&all, &cons).unwrap();
        assert_eq!(lrc.len(), 24 * 24 * 24);
        assert_eq!(lrc.max_degree(Var::X), 25);
        assert!(lrc_filter(&FunctionSet::new("empty", 0, 0), &cons)
            .unwrap()
            .is_empty());
        assert!(matches!(
            lrc_filter(&all, &cons[..2]),
            Err(Error::MissingConstraint(_))
        ));
    }

    #[test]
    fn tensor_and_rename() {
        let a = FunctionSet::from_terms(
            "a",
            vec![FunctionTerm::one(), FunctionTerm::monomial(&[(Var::X, 1)])],
        );
        let b = a.rename(Var::X, Var::Y);
        let ab = a.tensor(&b).unwrap();
        assert_eq!(ab.len(), 4);
        assert!(a.tensor(&a).is_err());
    }
}
