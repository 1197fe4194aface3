//! Construction specs (TOML) and the builders that turn them into codes with
//! recovery structures.

use serde::{Deserialize, Serialize};

use crate::codes::{coefficient_rank, evaluate_code, product_code, LinearCode};
use crate::curves::{self, CurveParams, CurvePointSet};
use crate::error::{Error, Result};
use crate::funcspace::{
    self as fsp, FunctionSet, FunctionTerm, GoodKind, GoodPolynomial, TbConstraint, Var,
};
use crate::gf::{Elem, Field, FieldRef};
use crate::locality::{Axis, InterpBasis, RecoveryStructure};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Construction {
    SuzukiTilde,
    SuzukiCm,
    SuzukiFiber,
    Tb,
    HermitianAvail2,
    SuzukiAffineLrc,
    ReeAffineLrc,
    ReeDualLrc,
    Product,
    ParamsOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KindName {
    Power,
    Subspace,
    Trace,
}

impl From<KindName> for GoodKind {
    fn from(k: KindName) -> GoodKind {
        match k {
            KindName::Power => GoodKind::Power,
            KindName::Subspace => GoodKind::Subspace,
            KindName::Trace => GoodKind::Trace,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstructionSpec {
    pub construction: Construction,
    pub q: Option<u64>,
    pub alpha: Option<u32>,
    pub s: Option<u64>,
    pub r: Option<u32>,
    pub s1: Option<u32>,
    pub s2: Option<u32>,
    pub k_prime: Option<u64>,
    pub ell_g: Option<u64>,
    pub kind: Option<KindName>,
    /// Number of partition blocks making up a Tamo-Barg evaluation set.
    pub parts: Option<usize>,
    /// Modulus override for the evaluation field (coefficients low to high).
    pub modulus: Option<Vec<u32>>,
    pub include_x_zero: Option<bool>,
    /// For `params_only`: thm1, thm3, prop1 or ree_fiber.
    pub which: Option<String>,
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub factors: Vec<ConstructionSpec>,
}

impl ConstructionSpec {
    pub fn new(construction: Construction) -> ConstructionSpec {
        ConstructionSpec {
            construction,
            q: None,
            alpha: None,
            s: None,
            r: None,
            s1: None,
            s2: None,
            k_prime: None,
            ell_g: None,
            kind: None,
            parts: None,
            modulus: None,
            include_x_zero: None,
            which: None,
            seed: None,
            factors: Vec::new(),
        }
    }

    pub fn from_toml(text: &str) -> Result<ConstructionSpec> {
        let spec: ConstructionSpec =
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        spec.check()?;
        Ok(spec)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("spec serializes")
    }

    fn need<T: Copy>(&self, v: Option<T>, name: &str) -> Result<T> {
        v.ok_or_else(|| Error::Config(format!("{:?} needs `{name}`", self.construction)))
    }

    /// Parameter completeness for the chosen construction.
    pub fn check(&self) -> Result<()> {
        use Construction::*;
        match self.construction {
            SuzukiTilde | SuzukiCm | SuzukiFiber => {
                self.need(self.q, "q")?;
                self.need(self.alpha, "alpha")?;
            }
            Tb => {
                self.need(self.q, "q")?;
                self.need(self.kind, "kind")?;
                self.need(self.r, "r")?;
                self.need(self.k_prime, "k_prime")?;
            }
            HermitianAvail2 | SuzukiAffineLrc | ReeAffineLrc | ReeDualLrc => {
                self.need(self.q, "q")?;
                self.need(self.s, "s")?;
            }
            Product => {
                if self.factors.len() < 2 {
                    return Err(Error::Config(
                        "product needs at least two [[factors]]".into(),
                    ));
                }
                for f in &self.factors {
                    f.check()?;
                }
            }
            ParamsOnly => {
                self.need(self.q, "q")?;
                let which = self
                    .which
                    .as_deref()
                    .ok_or_else(|| Error::Config("params_only needs `which`".into()))?;
                if !["thm1", "thm3", "prop1", "ree_fiber"].contains(&which) {
                    return Err(Error::Config(format!("unknown `which` = {which}")));
                }
            }
        }
        Ok(())
    }
}

/// A constructed code with its evaluation data and recovery structure.
///
/// When `dual_view` is set, `code` is the parity-check code and the LRC is its
/// dual, of dimension n - code.k().
#[derive(Debug, Clone)]
pub struct Built {
    pub label: String,
    pub code: LinearCode,
    pub dual_view: bool,
    pub points: CurvePointSet,
    pub functions: Option<FunctionSet>,
    pub structure: RecoveryStructure,
    /// Designed lower bound on the minimum distance.
    pub designed: Option<i64>,
    /// Closed-form dimension the construction promises, when there is one.
    pub expected_k: Option<u64>,
    pub s: Option<u64>,
}

impl Built {
    pub fn n(&self) -> usize {
        self.code.n()
    }

    /// Dimension of the LRC itself.
    pub fn k(&self) -> usize {
        if self.dual_view {
            self.code.n() - self.code.k()
        } else {
            self.code.k()
        }
    }
}

fn eval_field(p: u32, m: u32, modulus: &Option<Vec<u32>>) -> Result<FieldRef> {
    match modulus {
        Some(md) => Field::new(p, m, md),
        None => Field::with_default_modulus(p, m),
    }
}

/// The points of the cover over S in a caller-chosen copy of F_{q^4}.
pub fn suzuki_tilde_points(q: u64, modulus: &Option<Vec<u32>>) -> Result<CurvePointSet> {
    let params = CurveParams::suzuki_tilde(q)?;
    if modulus.is_none() {
        return curves::suzuki_tilde_d(q);
    }
    let ext = eval_field(2, params.eval_field_degree, modulus)?;
    let e = params.eval_field_degree / 4;
    let all = curves::suzuki_points(q, &ext)?;
    let f = ext.clone();
    let s = all.filter(curves::PointTag::S, move |p| {
        !(f.subfield_contains(p[0], e).unwrap() && f.subfield_contains(p[1], e).unwrap())
    });
    let table = curves::KummerTable::new(&ext, params.m);
    let mut coords = Vec::new();
    for p in s.iter() {
        for &c in table.roots(curves::kummer_rhs(&ext, p[0], q)) {
            if c != 0 {
                coords.extend_from_slice(&[p[0], p[1], c]);
            }
        }
    }
    Ok(CurvePointSet::new(
        ext,
        curves::Family::SuzukiTilde,
        curves::PointTag::D,
        vec![Var::X, Var::Y, Var::T],
        coords,
    ))
}

/// Closed-form lower bound for the cover code.
pub fn thm1_designed(q: u64, q0: u64, alpha: u64) -> i64 {
    let m = q - 2 * q0 + 1;
    let n = CurveParams::suzuki_tilde(q).unwrap().point_count.unwrap() as i64;
    n - (m * alpha * q * q + m * alpha + (m - 2) * q * q) as i64
}

/// Closed-form lower bound for the fiber-product code.
pub fn thm3_designed(q: u64, q0: u64, alpha: u64) -> i64 {
    let m = q - 2 * q0 + 1;
    let n = CurveParams::suzuki_tilde(q).unwrap().point_count.unwrap() as i64;
    n - (alpha * m * q + (q - 2) * m * (q + q0) + (m - 2) * q * q) as i64
}

/// The cover code: V = { f t^i } on the points over S; recovery along t.
pub fn build_suzuki_tilde(q: u64, alpha: u32, modulus: &Option<Vec<u32>>) -> Result<Built> {
    let params = CurveParams::suzuki_tilde(q)?;
    let fs = fsp::suzuki_tilde_v(q, alpha)?;
    let points = suzuki_tilde_points(q, modulus)?;
    let code = evaluate_code(&points, &fs)?;
    let structure = RecoveryStructure::build(
        &points,
        &[Axis {
            vary: 2,
            classes: None,
            basis: InterpBasis::Degree(params.m as u32 - 2),
        }],
    );
    let q0 = params.q0;
    Ok(Built {
        label: format!("suzuki_tilde(q={q}, alpha={alpha})"),
        code,
        dual_view: false,
        points,
        functions: Some(fs),
        structure,
        designed: Some(thm1_designed(q, q0, alpha as u64)),
        expected_k: Some((q - 2 * q0) * fsp::eid_basis_size(q, q0, alpha as u64)),
        s: None,
    })
}

/// The projection code with recovery along y.
pub fn build_suzuki_cm(q: u64, alpha: u32, modulus: &Option<Vec<u32>>) -> Result<Built> {
    let fs = fsp::cm_projection_v(q, alpha)?;
    let points = suzuki_tilde_points(q, modulus)?;
    let code = evaluate_code(&points, &fs)?;
    let structure = RecoveryStructure::build(
        &points,
        &[Axis {
            vary: 1,
            classes: None,
            basis: InterpBasis::Degree(q as u32 - 2),
        }],
    );
    Ok(Built {
        label: format!("suzuki_cm(q={q}, alpha={alpha})"),
        expected_k: Some(fs.len() as u64),
        code,
        dual_view: false,
        points,
        functions: Some(fs),
        structure,
        designed: None,
        s: None,
    })
}

/// The fiber-product code with two recovery directions (t and y).
pub fn build_suzuki_fiber(q: u64, alpha: u32, modulus: &Option<Vec<u32>>) -> Result<Built> {
    let params = CurveParams::suzuki_tilde(q)?;
    let fs = fsp::fiber_product_v(q, alpha)?;
    let points = suzuki_tilde_points(q, modulus)?;
    let code = evaluate_code(&points, &fs)?;
    let structure = RecoveryStructure::build(
        &points,
        &[
            Axis {
                vary: 2,
                classes: None,
                basis: InterpBasis::Degree(params.m as u32 - 2),
            },
            Axis {
                vary: 1,
                classes: None,
                basis: InterpBasis::Degree(q as u32 - 2),
            },
        ],
    );
    let q0 = params.q0;
    Ok(Built {
        label: format!("suzuki_fiber(q={q}, alpha={alpha})"),
        code,
        dual_view: false,
        points,
        functions: Some(fs),
        structure,
        designed: Some(thm3_designed(q, q0, alpha as u64)),
        expected_k: Some((q - 2 * q0) * (alpha as u64 + 1) * (q - 1)),
        s: None,
    })
}

/// Tamo-Barg code on the union of the first `parts` blocks of a partition.
pub fn build_tb(
    field: &FieldRef,
    gp: &GoodPolynomial,
    parts: usize,
    k_prime: u64,
    s_excluded: Option<u32>,
    var: Var,
) -> Result<Built> {
    if parts == 0 || parts > gp.parts.len() {
        return Err(Error::BadPartition(format!(
            "{parts} blocks requested, {} available",
            gp.parts.len()
        )));
    }
    let support = gp.support(parts);
    let points = CurvePointSet::line(field, var, &support);
    let fs = fsp::tb_functions(gp, var, k_prime, s_excluded);
    let code = evaluate_code(&points, &fs)?;
    let structure = RecoveryStructure::build(
        &points,
        &[Axis {
            vary: 0,
            classes: Some(gp.clone()),
            basis: InterpBasis::excluding(gp.r, s_excluded),
        }],
    );
    let designed = support.len() as i64 - fs.max_degree(var) as i64;
    Ok(Built {
        label: format!(
            "tb(q={}, r={}, k'={k_prime}, s={s_excluded:?}, n={})",
            field.order(),
            gp.r,
            support.len()
        ),
        expected_k: Some(fs.len() as u64),
        code,
        dual_view: false,
        points,
        functions: Some(fs),
        structure,
        designed: Some(designed),
        s: None,
    })
}

/// F_p-basis of the subfield GF(p^d) inside `f`, greedy in enumeration order.
pub fn subfield_basis(f: &Field, d: u32) -> Result<Vec<Elem>> {
    let mut basis = Vec::new();
    let mut span = vec![0 as Elem];
    for e in f.elements() {
        if !f.subfield_contains(e, d)? || span.contains(&e) {
            continue;
        }
        let mut next = span.clone();
        for k in 1..f.p() {
            let ke = f.mul(f.reduce_int(k as u64), e);
            next.extend(span.iter().map(|&x| f.add(x, ke)));
        }
        span = next;
        basis.push(e);
        if basis.len() as u32 == d {
            break;
        }
    }
    Ok(basis)
}

/// Subcode of the Hermitian code M(s) over F_{q^2} with x-blocks the cosets of
/// the order-(q+1) subgroup and y-blocks the additive cosets of F_q.
pub fn build_hermitian(
    q: u64,
    s: u64,
    s1: Option<u32>,
    s2: Option<u32>,
    include_x_zero: bool,
) -> Result<Built> {
    let points = curves::hermitian_points(q, include_x_zero)?;
    let f = points.field.clone();
    let r1 = q as u32;
    let gx = fsp::tb_partition(&f, GoodKind::Power, r1)?;
    let half = f.m() / 2;
    let gy = GoodPolynomial::subspace(&f, &subfield_basis(&f, half)?)?;
    let r2 = gy.r;
    let (s1, s2) = (s1.unwrap_or(r2), s2.unwrap_or(r2));
    let cons = [
        TbConstraint {
            var: Var::X,
            gp: gx.clone(),
            s_excluded: Some(s1),
            max_g_exp: None,
        },
        TbConstraint {
            var: Var::Y,
            gp: gy.clone(),
            s_excluded: Some(s2),
            max_g_exp: None,
        },
    ];
    let fs = fsp::lrc_filter(&fsp::hermitian_m(q, s), &cons)?;
    let code = evaluate_code(&points, &fs)?;
    let structure = RecoveryStructure::build(
        &points,
        &[
            Axis {
                vary: 0,
                classes: Some(gx),
                basis: InterpBasis::excluding(r1, Some(s1)),
            },
            Axis {
                vary: 1,
                classes: Some(gy),
                basis: InterpBasis::excluding(r2, Some(s2)),
            },
        ],
    );
    Ok(Built {
        label: format!("hermitian_avail2(q={q}, s={s}, s1={s1}, s2={s2})"),
        expected_k: None,
        code,
        dual_view: false,
        designed: Some(points.len() as i64 - s as i64),
        points,
        functions: Some(fs),
        structure,
        s: Some(s),
    })
}

/// Everything the Suzuki affine LRC sweep shares across values of s.
pub struct SuzukiAffineContext {
    pub points: CurvePointSet,
    pub gp: GoodPolynomial,
    pub s1: u32,
    pub s2: u32,
    /// The product Tamo-Barg code evaluated on the curve points.
    pub tb_code: LinearCode,
}

impl SuzukiAffineContext {
    pub fn new(
        q: u64,
        s1: Option<u32>,
        s2: Option<u32>,
        modulus: &Option<Vec<u32>>,
    ) -> Result<Self> {
        let params = CurveParams::suzuki(q)?;
        let e = params.eval_field_degree / 4;
        let field = eval_field(2, e, modulus)?;
        let points = curves::suzuki_points(q, &field)?;
        let r = (q / 2) as u32 - 1;
        let gp = fsp::tb_partition(&field, GoodKind::Subspace, r)?;
        let (s1, s2) = (s1.unwrap_or(r), s2.unwrap_or(r));
        let full = (r as u64 + 1) * gp.parts.len() as u64;
        let fx = fsp::tb_functions(&gp, Var::X, full, Some(s1));
        let fy = fsp::tb_functions(&gp, Var::X, full, Some(s2)).rename(Var::X, Var::Y);
        let tb_code = evaluate_code(&points, &fx.tensor(&fy)?)?;
        Ok(SuzukiAffineContext {
            points,
            gp,
            s1,
            s2,
            tb_code,
        })
    }

    pub fn suzuki_code(&self, s: u64) -> Result<(FunctionSet, LinearCode)> {
        let fs = fsp::suzuki_affine_l(self.gp_q(), s)?;
        let code = evaluate_code(&self.points, &fs)?;
        Ok((fs, code))
    }

    fn gp_q(&self) -> u64 {
        self.points.field.order() as u64
    }

    pub fn build(&self, s: u64) -> Result<Built> {
        let (fs, suz) = self.suzuki_code(s)?;
        let code = suz.intersect(&self.tb_code)?;
        let r = self.gp.r;
        let structure = RecoveryStructure::build(
            &self.points,
            &[
                Axis {
                    vary: 0,
                    classes: Some(self.gp.clone()),
                    basis: InterpBasis::excluding(r, Some(self.s1)),
                },
                Axis {
                    vary: 1,
                    classes: Some(self.gp.clone()),
                    basis: InterpBasis::excluding(r, Some(self.s2)),
                },
            ],
        );
        Ok(Built {
            label: format!(
                "suzuki_affine_lrc(q={}, s={s}, s1={}, s2={})",
                self.gp_q(),
                self.s1,
                self.s2
            ),
            code,
            dual_view: false,
            designed: Some(self.points.len() as i64 - s as i64),
            points: self.points.clone(),
            functions: Some(fs),
            structure,
            expected_k: None,
            s: Some(s),
        })
    }
}

fn ree_trace_setup(q: u64) -> Result<(FieldRef, GoodPolynomial, Vec<TbConstraint>)> {
    let params = CurveParams::ree(q)?;
    let f = Field::with_default_modulus(3, params.eval_field_degree)?;
    let r = (q / 3) as u32 - 1;
    let gp = fsp::tb_partition(&f, GoodKind::Trace, r)?;
    let cons = [Var::X, Var::Y, Var::Z]
        .iter()
        .map(|&var| TbConstraint {
            var,
            gp: gp.clone(),
            s_excluded: Some(r),
            max_g_exp: Some(2),
        })
        .collect();
    Ok((f, gp, cons))
}

/// The Ree LRC function set: ree_affine_L(s) rewritten as L(X)^a X^b ... with b <= 7.
pub fn ree_lrc_functions(q: u64, s: u64) -> Result<FunctionSet> {
    let (_, _, cons) = ree_trace_setup(q)?;
    fsp::lrc_filter(&fsp::ree_affine_l(q, s)?, &cons)
}

/// The products L(X)^i L(Y)^j L(Z)^k, 0 <= i, j, k <= 2, spanning the box indicators.
pub fn ree_parity_functions(q: u64) -> Result<FunctionSet> {
    let (_, gp, _) = ree_trace_setup(q)?;
    let mut fs = FunctionSet::new(format!("trace_parities(q={q})"), q, 0);
    let pi = fs.add_poly(gp);
    for i in 0..3u32 {
        for j in 0..3u32 {
            for k in 0..3u32 {
                let mut t = FunctionTerm::one();
                for (var, e) in [(Var::X, i), (Var::Y, j), (Var::Z, k)] {
                    if e > 0 {
                        t.good.push(fsp::GoodFactor {
                            var,
                            poly: pi,
                            exp: e,
                        });
                    }
                }
                fs.push(t);
            }
        }
    }
    Ok(fs)
}

/// Union of two function sets (polys of `b` reindexed).
pub fn union(a: &FunctionSet, b: &FunctionSet) -> FunctionSet {
    let mut out = a.clone();
    out.provenance = format!("{} + {}", a.provenance, b.provenance);
    let map: Vec<usize> = b.polys.iter().map(|p| out.add_poly(p.clone())).collect();
    for t in &b.terms {
        let mut t = t.clone();
        for g in &mut t.good {
            g.poly = map[g.poly];
        }
        out.push(t);
    }
    out
}

/// Dimension of the Ree LRC subcode at weight s (coefficient-space rank).
pub fn ree_lrc_dimension(q: u64, s: u64) -> Result<usize> {
    let (f, _, _) = ree_trace_setup(q)?;
    coefficient_rank(&f, &ree_lrc_functions(q, s)?, &[Var::X, Var::Y, Var::Z])
}

/// Dimension of L(s) plus the 27 trace parities (coefficient-space rank).
pub fn ree_dual_check_rank(q: u64, s: u64) -> Result<usize> {
    let (f, _, _) = ree_trace_setup(q)?;
    let fs = union(&fsp::ree_affine_l(q, s)?, &ree_parity_functions(q)?);
    coefficient_rank(&f, &fs, &[Var::X, Var::Y, Var::Z])
}

fn ree_axes(gp: &GoodPolynomial) -> Vec<Axis> {
    (0..3)
        .map(|vary| Axis {
            vary,
            classes: Some(gp.clone()),
            basis: InterpBasis::Degree(gp.r - 1),
        })
        .collect()
}

/// Ree LRC with three recovery directions, evaluated densely.
pub fn build_ree_affine(q: u64, s: u64) -> Result<Built> {
    let (_, gp, _) = ree_trace_setup(q)?;
    let points = curves::ree_points(q)?;
    let fs = ree_lrc_functions(q, s)?;
    let code = evaluate_code(&points, &fs)?;
    let structure = RecoveryStructure::build(&points, &ree_axes(&gp));
    Ok(Built {
        label: format!("ree_affine_lrc(q={q}, s={s})"),
        expected_k: Some(fs.len() as u64),
        code,
        dual_view: false,
        designed: Some(points.len() as i64 - s as i64),
        points,
        functions: Some(fs),
        structure,
        s: Some(s),
    })
}

/// Trace-box parity sets on F_q^3: each position recovers from the rest of its
/// box A_a x A_b x A_c by a zero sum.
pub fn ree_box_structure(q: u64) -> Result<(CurvePointSet, RecoveryStructure)> {
    let (_, gp, _) = ree_trace_setup(q)?;
    let points = curves::ree_points(q)?;
    let mut boxes: std::collections::BTreeMap<[usize; 3], Vec<usize>> =
        std::collections::BTreeMap::new();
    for (i, p) in points.iter().enumerate() {
        let key = [0, 1, 2].map(|c| gp.part_of(p[c]).expect("trace parts cover the field"));
        boxes.entry(key).or_default().push(i);
    }
    let mut sets = vec![Vec::new(); points.len()];
    for members in boxes.values() {
        for &j in members {
            let positions: Vec<usize> = members.iter().copied().filter(|&i| i != j).collect();
            sets[j].push(crate::locality::RecoverySet {
                abscissae: vec![0; positions.len()],
                positions,
                target: 0,
                basis: InterpBasis::ZeroSum,
            });
        }
    }
    let structure = RecoveryStructure {
        sets,
        dropped: Vec::new(),
    };
    Ok((points, structure))
}

/// Dual construction: the LRC is the dual of ev(L(s) + trace parities), carried
/// by that check code. Recovery sets come from [`ree_box_structure`].
pub fn build_ree_dual(q: u64, s: u64) -> Result<Built> {
    let (points, structure) = ree_box_structure(q)?;
    let fs = union(&fsp::ree_affine_l(q, s)?, &ree_parity_functions(q)?);
    let check = evaluate_code(&points, &fs)?;
    Ok(Built {
        label: format!("ree_dual_lrc(q={q}, s={s})"),
        code: check,
        dual_view: true,
        designed: None,
        points,
        functions: Some(fs),
        structure,
        expected_k: None,
        s: Some(s),
    })
}

/// Reed-Solomon code of dimension k on `support`, every other position forming
/// the recovery set.
pub fn build_rs(field: &FieldRef, support: &[Elem], k: u64) -> Result<Built> {
    if k == 0 || k as usize > support.len() {
        return Err(Error::Config(format!(
            "RS dimension {k} outside 1..={}",
            support.len()
        )));
    }
    let points = CurvePointSet::line(field, Var::X, support);
    let mut fs = FunctionSet::new(format!("rs(k={k})"), field.order() as u64, 0);
    for e in 0..k as u32 {
        fs.push(FunctionTerm::monomial(&[(Var::X, e)]));
    }
    let code = evaluate_code(&points, &fs)?;
    let structure = RecoveryStructure::build(
        &points,
        &[Axis {
            vary: 0,
            classes: None,
            basis: InterpBasis::Degree(k as u32 - 1),
        }],
    );
    Ok(Built {
        label: format!("rs(q={}, n={}, k={k})", field.order(), support.len()),
        expected_k: Some(k),
        code,
        dual_view: false,
        designed: Some(support.len() as i64 - k as i64 + 1),
        points,
        functions: Some(fs),
        structure,
        s: None,
    })
}

const PRODUCT_VARS: [Var; 3] = [Var::X, Var::Y, Var::Z];

/// Product of already built factors, row-major positions.
pub fn build_product(factors: &[Built]) -> Result<Built> {
    let mut it = factors.iter();
    let first = it
        .next()
        .ok_or_else(|| Error::Config("product without factors".into()))?;
    if factors.iter().any(|b| b.dual_view || b.points.dim() != 1) {
        return Err(Error::Config(
            "product factors must be one-dimensional generator codes".into(),
        ));
    }
    if factors.len() > PRODUCT_VARS.len() {
        return Err(Error::Config("at most three product factors".into()));
    }
    let rename = |b: &Built, i: usize| {
        let mut p = b.points.clone();
        p.vars = vec![PRODUCT_VARS[i]];
        p
    };
    let mut code = first.code.clone();
    let mut points = rename(first, 0);
    let mut structure = first.structure.clone();
    let mut designed = first.designed;
    let mut label = first.label.clone();
    for (i, b) in it.enumerate() {
        code = product_code(&code, &b.code)?;
        points = points.product(&rename(b, i + 1))?;
        structure = RecoveryStructure::product(&structure, &b.structure);
        designed = designed.zip(b.designed).map(|(a, c)| a * c);
        label = format!("{label} x {}", b.label);
    }
    Ok(Built {
        label: format!("product[{label}]"),
        expected_k: Some(factors.iter().map(|b| b.k() as u64).product()),
        code,
        dual_view: false,
        points,
        functions: None,
        structure,
        designed,
        s: None,
    })
}

/// Builds the code a spec describes.
pub fn build(spec: &ConstructionSpec) -> Result<Built> {
    spec.check()?;
    use Construction::*;
    let q = spec.q.unwrap_or(0);
    match spec.construction {
        SuzukiTilde => build_suzuki_tilde(q, spec.alpha.unwrap(), &spec.modulus),
        SuzukiCm => build_suzuki_cm(q, spec.alpha.unwrap(), &spec.modulus),
        SuzukiFiber => build_suzuki_fiber(q, spec.alpha.unwrap(), &spec.modulus),
        Tb => {
            let (p, m) = crate::gf::prime_power(q)
                .ok_or_else(|| Error::Config(format!("q = {q} is not a prime power")))?;
            let field = eval_field(p, m, &spec.modulus)?;
            let r = spec.r.unwrap();
            let gp = fsp::tb_partition(&field, spec.kind.unwrap().into(), r)?;
            let parts = spec.parts.unwrap_or(gp.parts.len());
            build_tb(
                &field,
                &gp,
                parts,
                spec.k_prime.unwrap(),
                Some(spec.s1.unwrap_or(r)),
                Var::X,
            )
        }
        HermitianAvail2 => build_hermitian(
            q,
            spec.s.unwrap(),
            spec.s1,
            spec.s2,
            spec.include_x_zero.unwrap_or(true),
        ),
        SuzukiAffineLrc => {
            SuzukiAffineContext::new(q, spec.s1, spec.s2, &spec.modulus)?.build(spec.s.unwrap())
        }
        ReeAffineLrc => build_ree_affine(q, spec.s.unwrap()),
        ReeDualLrc => build_ree_dual(q, spec.s.unwrap()),
        Product => {
            let built = spec.factors.iter().map(build).collect::<Result<Vec<_>>>()?;
            build_product(&built)
        }
        ParamsOnly => Err(Error::Config(
            "params_only describes formulas, not a code; use `params`".into(),
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_round_trip_with_factors() {
        let text = r#"
construction = "product"

[[factors]]
construction = "tb"
q = 16
kind = "subspace"
r = 3
k_prime = 2
parts = 2

[[factors]]
construction = "tb"
q = 16
kind = "subspace"
r = 3
k_prime = 2
parts = 2
"#;
        let spec = ConstructionSpec::from_toml(text).unwrap();
        assert_eq!(spec.factors.len(), 2);
        let again = ConstructionSpec::from_toml(&spec.to_toml()).unwrap();
        assert_eq!(again, spec);
    }

    #[test]
    fn incomplete_spec_rejected() {
        let err =
            ConstructionSpec::from_toml("construction = \"suzuki_tilde\"\nq = 8\n").unwrap_err();
        assert!(matches!(err, Error::Config(_)));
        assert!(ConstructionSpec::from_toml("construction = \"nope\"").is_err());
    }

    #[test]
    fn subfield_basis_of_gf16() {
        let f = Field::of_order(16).unwrap();
        let b = subfield_basis(&f, 2).unwrap();
        assert_eq!(b.len(), 2);
        let gp = GoodPolynomial::subspace(&f, &b).unwrap();
        let mut h = gp.parts[0].clone();
        h.sort();
        let mut want: Vec<Elem> = f
            .elements()
            .filter(|&e| f.subfield_contains(e, 2).unwrap())
            .collect();
        want.sort();
        assert_eq!(h, want);
        // g = Y^4 + Y
        assert_eq!(gp.coeffs, vec![(1, 1), (4, 1)]);
    }

    #[test]
    fn tb_27_9_18_builds() {
        let mut spec = ConstructionSpec::new(Construction::Tb);
        spec.q = Some(27);
        spec.kind = Some(KindName::Trace);
        spec.r = Some(8);
        spec.k_prime = Some(10);
        let b = build(&spec).unwrap();
        assert_eq!((b.n(), b.k(), b.designed), (27, 9, Some(18)));
    }
}
