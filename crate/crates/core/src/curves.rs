//! Affine rational points of the Hermitian, Suzuki and Ree curves, the Kummer
//! covers built over them, and projection fibers.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::funcspace::Var;
use crate::gf::{Elem, Field, FieldRef};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Hermitian,
    Suzuki,
    Ree,
    Kummer,
    SuzukiTilde,
    ReeTilde,
    /// Points of an affine space or a subset of the affine line (Tamo-Barg).
    Affine,
    /// Cartesian product of two point sets.
    Product,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointTag {
    AllAffine,
    S,
    D,
}

/// Closed-form description of a curve family instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveParams {
    pub family: Family,
    pub q: u64,
    pub q0: u64,
    /// Kummer exponent for the cyclic extensions, 0 otherwise.
    pub m: u64,
    /// Degree over GF(p) of the field the points live in.
    pub eval_field_degree: u32,
    /// Number of points in the evaluation set, when known in closed form.
    pub point_count: Option<u128>,
}

fn log_exact(n: u64, base: u64) -> Option<u32> {
    let mut k = 0;
    let mut v = 1u64;
    while v < n {
        v = v.checked_mul(base)?;
        k += 1;
    }
    (v == n).then_some(k)
}

impl CurveParams {
    /// q = 2 q0^2 with q0 = 2^s, s >= 1.
    pub fn suzuki(q: u64) -> Result<CurveParams> {
        let e = log_exact(q, 2)
            .filter(|e| e % 2 == 1 && *e >= 3)
            .ok_or_else(|| {
                Error::BadCurveParams(format!("{q} is not 2*q0^2 with q0 = 2^s, s >= 1"))
            })?;
        let q0 = 1u64 << ((e - 1) / 2);
        let (q, q0w) = (q as u128, q0 as u128);
        Ok(CurveParams {
            family: Family::Suzuki,
            q: q as u64,
            q0,
            m: 0,
            eval_field_degree: 4 * e,
            point_count: Some(q * q * q * q + 2 * q0w * q * q * (q - 1) - q * q),
        })
    }

    /// q = 3 q0^2 with q0 = 3^s, s >= 1.
    pub fn ree(q: u64) -> Result<CurveParams> {
        let e = log_exact(q, 3)
            .filter(|e| e % 2 == 1 && *e >= 3)
            .ok_or_else(|| {
                Error::BadCurveParams(format!("{q} is not 3*q0^2 with q0 = 3^s, s >= 1"))
            })?;
        Ok(CurveParams {
            family: Family::Ree,
            q,
            q0: 3u64.pow((e - 1) / 2),
            m: 0,
            eval_field_degree: e,
            point_count: Some((q as u128).pow(3)),
        })
    }

    pub fn hermitian(q: u64) -> Result<CurveParams> {
        let (_, e) = crate::gf::prime_power(q)
            .ok_or_else(|| Error::BadCurveParams(format!("{q} is not a prime power")))?;
        Ok(CurveParams {
            family: Family::Hermitian,
            q,
            q0: 0,
            m: 0,
            eval_field_degree: 2 * e,
            point_count: Some((q as u128).pow(3)),
        })
    }

    /// The cover t^m = x^q + x of the Suzuki curve, m = q - 2 q0 + 1.
    pub fn suzuki_tilde(q: u64) -> Result<CurveParams> {
        let base = CurveParams::suzuki(q)?;
        let m = q - 2 * base.q0 + 1;
        Ok(CurveParams {
            family: Family::SuzukiTilde,
            m,
            point_count: base.point_count.map(|s| s * m as u128),
            ..base
        })
    }

    /// The cover t^m = x^q - x of the Ree curve, m = q - 3 q0 + 1, with points
    /// over F_{q^6}; only the formula values are provided.
    pub fn ree_tilde(q: u64) -> Result<CurveParams> {
        let base = CurveParams::ree(q)?;
        let q128 = q as u128;
        Ok(CurveParams {
            family: Family::ReeTilde,
            m: q - 3 * base.q0 + 1,
            eval_field_degree: 6 * base.eval_field_degree,
            point_count: Some(q128.pow(7) - q128.pow(6) + q128.pow(4) - q128.pow(3)),
            ..base
        })
    }
}

/// Parameters of the Ree cyclic extension without enumerating any points.
pub fn ree_tilde_params(q: u64) -> Result<CurveParams> {
    CurveParams::ree_tilde(q)
}

/// An ordered list of affine points with named coordinates.
#[derive(Debug, Clone)]
pub struct CurvePointSet {
    pub field: FieldRef,
    pub family: Family,
    pub tag: PointTag,
    pub vars: Vec<Var>,
    coords: Vec<Elem>,
}

impl CurvePointSet {
    pub fn new(
        field: FieldRef,
        family: Family,
        tag: PointTag,
        vars: Vec<Var>,
        coords: Vec<Elem>,
    ) -> Self {
        assert_eq!(coords.len() % vars.len().max(1), 0);
        CurvePointSet {
            field,
            family,
            tag,
            vars,
            coords,
        }
    }

    pub fn len(&self) -> usize {
        if self.vars.is_empty() {
            0
        } else {
            self.coords.len() / self.vars.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn dim(&self) -> usize {
        self.vars.len()
    }

    pub fn point(&self, i: usize) -> &[Elem] {
        let d = self.dim();
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn iter(&self) -> impl Iterator<Item = &[Elem]> {
        self.coords.chunks(self.dim().max(1))
    }

    pub fn coord_index(&self, v: Var) -> Option<usize> {
        self.vars.iter().position(|&w| w == v)
    }

    /// Keeps the points for which `keep` holds, preserving order.
    pub fn filter(&self, tag: PointTag, keep: impl Fn(&[Elem]) -> bool) -> CurvePointSet {
        let coords = self
            .iter()
            .filter(|p| keep(p))
            .flat_map(|p| p.iter().copied())
            .collect();
        CurvePointSet::new(
            self.field.clone(),
            self.family,
            tag,
            self.vars.clone(),
            coords,
        )
    }

    /// Every point of `F^vars.len()` in lexicographic enumeration order.
    pub fn affine_space(field: &FieldRef, vars: &[Var]) -> CurvePointSet {
        let q = field.order() as usize;
        let d = vars.len();
        let total = q.pow(d as u32);
        let mut coords = Vec::with_capacity(total * d);
        for idx in 0..total {
            let mut rest = idx;
            let mut pt = vec![0; d];
            for slot in pt.iter_mut().rev() {
                *slot = field.from_rank((rest % q) as u32);
                rest /= q;
            }
            coords.extend(pt);
        }
        CurvePointSet::new(
            field.clone(),
            Family::Affine,
            PointTag::AllAffine,
            vars.to_vec(),
            coords,
        )
    }

    /// Points of the affine line given by `values` in the given order.
    pub fn line(field: &FieldRef, var: Var, values: &[Elem]) -> CurvePointSet {
        CurvePointSet::new(
            field.clone(),
            Family::Affine,
            PointTag::AllAffine,
            vec![var],
            values.to_vec(),
        )
    }

    /// Cartesian product in row-major order: position `i * |other| + j`.
    pub fn product(&self, other: &CurvePointSet) -> Result<CurvePointSet> {
        if self.field.id() != other.field.id() {
            return Err(Error::FieldMismatch);
        }
        let mut vars = self.vars.clone();
        vars.extend(other.vars.iter().copied());
        let mut coords = Vec::with_capacity(self.len() * other.len() * vars.len());
        for a in self.iter() {
            for b in other.iter() {
                coords.extend_from_slice(a);
                coords.extend_from_slice(b);
            }
        }
        Ok(CurvePointSet::new(
            self.field.clone(),
            Family::Product,
            PointTag::AllAffine,
            vars,
            coords,
        ))
    }

    /// Checks every point against a predicate; used to verify defining equations.
    pub fn all_satisfy(&self, pred: impl Fn(&[Elem]) -> bool + Sync + Send) -> bool {
        self.coords.par_chunks(self.dim().max(1)).all(pred)
    }
}

/// Preimages of the additive map b -> b^q + b (or b^q - b when `plus` is false),
/// indexed by the image value, each list in enumeration order.
pub struct ArtinSchreierTable {
    preimages: Vec<Vec<Elem>>,
}

impl ArtinSchreierTable {
    pub fn new(field: &Field, q: u64, plus: bool) -> Self {
        let mut preimages = vec![Vec::new(); field.order() as usize];
        for b in field.elements() {
            let bq = field.pow(b, q);
            let v = if plus {
                field.add(bq, b)
            } else {
                field.sub(bq, b)
            };
            preimages[v as usize].push(b);
        }
        ArtinSchreierTable { preimages }
    }

    pub fn solve(&self, rhs: Elem) -> &[Elem] {
        &self.preimages[rhs as usize]
    }
}

/// Roots of t^m = a for every a, each list in enumeration order.
pub struct KummerTable {
    roots: Vec<Vec<Elem>>,
}

impl KummerTable {
    pub fn new(field: &Field, m: u64) -> Self {
        let mut roots = vec![Vec::new(); field.order() as usize];
        for t in field.elements() {
            roots[field.pow(t, m) as usize].push(t);
        }
        KummerTable { roots }
    }

    pub fn roots(&self, a: Elem) -> &[Elem] {
        &self.roots[a as usize]
    }
}

fn check_contains(ext: &Field, p: u32, q: u64) -> Result<u32> {
    let e = log_exact(q, p as u64).unwrap_or(0);
    if ext.p() != p || e == 0 || !ext.m().is_multiple_of(e) {
        return Err(Error::BadCurveParams(format!(
            "GF({}) does not contain GF({q})",
            ext.order()
        )));
    }
    Ok(e)
}

/// x^q + x in characteristic 2, x^q - x otherwise.
pub fn kummer_rhs(field: &Field, a: Elem, q: u64) -> Elem {
    field.sub(field.pow(a, q), a)
}

/// All (a, b) over `ext` with b^q + b = a^q0 (a^q + a).
pub fn suzuki_points(q: u64, ext: &FieldRef) -> Result<CurvePointSet> {
    let params = CurveParams::suzuki(q)?;
    check_contains(ext, 2, q)?;
    let table = ArtinSchreierTable::new(ext, q, true);
    let mut coords = Vec::new();
    for a in ext.elements() {
        let rhs = ext.mul(ext.pow(a, params.q0), kummer_rhs(ext, a, q));
        for &b in table.solve(rhs) {
            coords.push(a);
            coords.push(b);
        }
    }
    Ok(CurvePointSet::new(
        ext.clone(),
        Family::Suzuki,
        PointTag::AllAffine,
        vec![Var::X, Var::Y],
        coords,
    ))
}

/// The points of the Suzuki curve over F_{q^4} that are not F_q-rational.
pub fn suzuki_s(q: u64) -> Result<CurvePointSet> {
    let params = CurveParams::suzuki(q)?;
    let ext = Field::with_default_modulus(2, params.eval_field_degree)?;
    let e = params.eval_field_degree / 4;
    let all = suzuki_points(q, &ext)?;
    let f = ext.clone();
    Ok(all.filter(PointTag::S, move |p| {
        !(f.subfield_contains(p[0], e).unwrap() && f.subfield_contains(p[1], e).unwrap())
    }))
}

/// All t in the field with t^m = a^q + a (char 2) or a^q - a (char 3).
pub fn kummer_fiber(field: &Field, a: Elem, q: u64, m: u64) -> Vec<Elem> {
    let target = kummer_rhs(field, a, q);
    field
        .elements()
        .filter(|&t| field.pow(t, m) == target)
        .collect()
}

/// Points (a, b, c) of the cover t^m = x^q + x lying over S, with c != 0.
pub fn suzuki_tilde_d(q: u64) -> Result<CurvePointSet> {
    let params = CurveParams::suzuki_tilde(q)?;
    let s = suzuki_s(q)?;
    let field = s.field.clone();
    let table = KummerTable::new(&field, params.m);
    let mut coords = Vec::with_capacity(s.len() * 3 * params.m as usize);
    for p in s.iter() {
        let rhs = kummer_rhs(&field, p[0], q);
        for &c in table.roots(rhs) {
            if c != 0 {
                coords.extend_from_slice(&[p[0], p[1], c]);
            }
        }
    }
    Ok(CurvePointSet::new(
        field,
        Family::SuzukiTilde,
        PointTag::D,
        vec![Var::X, Var::Y, Var::T],
        coords,
    ))
}

/// All (a, b, c) in F_q^3 with b^q - b = a^q0 (a^q - a) and c^q - c = a^{2 q0} (a^q - a).
pub fn ree_points(q: u64) -> Result<CurvePointSet> {
    let params = CurveParams::ree(q)?;
    let field = Field::with_default_modulus(3, params.eval_field_degree)?;
    let table = ArtinSchreierTable::new(&field, q, false);
    let mut coords = Vec::new();
    for a in field.elements() {
        let base = kummer_rhs(&field, a, q);
        let ry = field.mul(field.pow(a, params.q0), base);
        let rz = field.mul(field.pow(a, 2 * params.q0), base);
        for &b in table.solve(ry) {
            for &c in table.solve(rz) {
                coords.extend_from_slice(&[a, b, c]);
            }
        }
    }
    Ok(CurvePointSet::new(
        field,
        Family::Ree,
        PointTag::AllAffine,
        vec![Var::X, Var::Y, Var::Z],
        coords,
    ))
}

/// Affine points of x^{q+1} = y^q + y over F_{q^2}.
pub fn hermitian_points(q: u64, include_x_zero: bool) -> Result<CurvePointSet> {
    let params = CurveParams::hermitian(q)?;
    let (p, _) = crate::gf::prime_power(q).expect("checked above");
    let field = Field::with_default_modulus(p, params.eval_field_degree)?;
    let table = ArtinSchreierTable::new(&field, q, true);
    let mut coords = Vec::new();
    for a in field.elements() {
        if a == 0 && !include_x_zero {
            continue;
        }
        for &b in table.solve(field.pow(a, q + 1)) {
            coords.extend_from_slice(&[a, b]);
        }
    }
    Ok(CurvePointSet::new(
        field,
        Family::Hermitian,
        PointTag::AllAffine,
        vec![Var::X, Var::Y],
        coords,
    ))
}

/// A partition of positions into fibers of a coordinate projection.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fibers {
    pub fixed: Vec<usize>,
    pub varying: Vec<usize>,
    pub groups: Vec<Vec<usize>>,
    pub group_of: Vec<usize>,
}

impl Fibers {
    /// Values of the varying coordinates at each member of group `g`.
    pub fn abscissae(&self, points: &CurvePointSet, g: usize) -> Vec<Vec<Elem>> {
        self.groups[g]
            .iter()
            .map(|&i| self.varying.iter().map(|&c| points.point(i)[c]).collect())
            .collect()
    }
}

/// Groups positions whose points agree on all `fixed` coordinates; groups are
/// ordered by first appearance.
pub fn projection_fibers(points: &CurvePointSet, fixed: &[usize]) -> Result<Fibers> {
    if fixed.is_empty() || fixed.iter().any(|&c| c >= points.dim()) {
        return Err(Error::BadPartition(format!(
            "fixed coordinates {fixed:?} invalid for dimension {}",
            points.dim()
        )));
    }
    let mut index: HashMap<Vec<Elem>, usize> = HashMap::new();
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_of = Vec::with_capacity(points.len());
    for (i, p) in points.iter().enumerate() {
        let key: Vec<Elem> = fixed.iter().map(|&c| p[c]).collect();
        let g = *index.entry(key).or_insert_with(|| {
            groups.push(Vec::new());
            groups.len() - 1
        });
        groups[g].push(i);
        group_of.push(g);
    }
    let varying = (0..points.dim()).filter(|c| !fixed.contains(c)).collect();
    Ok(Fibers {
        fixed: fixed.to_vec(),
        varying,
        groups,
        group_of,
    })
}

/// Shared handle for point sets passed between modules.
pub type PointsRef = Arc<CurvePointSet>;
