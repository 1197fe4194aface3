//! Recovery sets along coordinate fibers, their certification against the code,
//! and erasure repair by interpolation.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::codes::LinearCode;
use crate::curves::CurvePointSet;
use crate::error::{Error, Result};
use crate::funcspace::GoodPolynomial;
use crate::gf::{Elem, Field};
use crate::matrix::Matrix;

const SIDECAR_MAGIC: &[u8; 4] = b"LRCS";
const SIDECAR_VERSION: u8 = 1;

/// How the symbols of a recovery set determine the erased one.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum InterpBasis {
    /// Restriction is a polynomial of at most this degree in the varying coordinate.
    Degree(u32),
    /// Restriction lies in the span of these powers of the varying coordinate.
    Exponents(Vec<u32>),
    /// Symbols of the set together with the erased one sum to zero.
    ZeroSum,
}

impl InterpBasis {
    /// Points needed to pin down the restriction.
    pub fn needed(&self) -> usize {
        match self {
            InterpBasis::Degree(d) => *d as usize + 1,
            InterpBasis::Exponents(e) => e.len(),
            InterpBasis::ZeroSum => 1,
        }
    }

    /// The exponents {0, ..., r} without `s`, collapsed to a degree bound when `s = r`.
    pub fn excluding(r: u32, s: Option<u32>) -> InterpBasis {
        match s {
            Some(s) if s == r => InterpBasis::Degree(r - 1),
            Some(s) => InterpBasis::Exponents((0..=r).filter(|&i| i != s).collect()),
            None => InterpBasis::Degree(r),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoverySet {
    pub positions: Vec<usize>,
    pub abscissae: Vec<Elem>,
    pub target: Elem,
    pub basis: InterpBasis,
}

/// A fiber that was too small to support its declared interpolation basis.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberTooSmall {
    pub position: usize,
    pub axis: usize,
    pub size: usize,
    pub needed: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecoveryStructure {
    pub sets: Vec<Vec<RecoverySet>>,
    pub dropped: Vec<FiberTooSmall>,
}

/// One direction of recovery: vary coordinate `vary`, keep the others fixed, and
/// optionally stay inside one part of a good polynomial's partition.
#[derive(Debug, Clone)]
pub struct Axis {
    pub vary: usize,
    pub classes: Option<GoodPolynomial>,
    pub basis: InterpBasis,
}

impl RecoveryStructure {
    pub fn n(&self) -> usize {
        self.sets.len()
    }

    /// Builds one set per axis per position: the position's fiber minus itself.
    pub fn build(points: &CurvePointSet, axes: &[Axis]) -> RecoveryStructure {
        let n = points.len();
        let mut sets: Vec<Vec<RecoverySet>> = vec![Vec::new(); n];
        let mut dropped = Vec::new();
        for (ai, axis) in axes.iter().enumerate() {
            let lookup: Option<HashMap<Elem, usize>> = axis.classes.as_ref().map(|gp| {
                gp.parts
                    .iter()
                    .enumerate()
                    .flat_map(|(i, part)| part.iter().map(move |&x| (x, i)))
                    .collect()
            });
            let mut groups: HashMap<(Vec<Elem>, Option<usize>), Vec<usize>> = HashMap::new();
            for (i, p) in points.iter().enumerate() {
                let fixed: Vec<Elem> = p
                    .iter()
                    .enumerate()
                    .filter(|&(c, _)| c != axis.vary)
                    .map(|(_, &v)| v)
                    .collect();
                let class = match &lookup {
                    Some(l) => match l.get(&p[axis.vary]) {
                        Some(&c) => Some(c),
                        // outside every part: a fiber of its own
                        None => Some(usize::MAX - i),
                    },
                    None => None,
                };
                groups.entry((fixed, class)).or_default().push(i);
            }
            for members in groups.values() {
                let needed = axis.basis.needed();
                for &j in members {
                    let positions: Vec<usize> =
                        members.iter().copied().filter(|&i| i != j).collect();
                    if positions.len() < needed {
                        dropped.push(FiberTooSmall {
                            position: j,
                            axis: ai,
                            size: positions.len(),
                            needed,
                        });
                        continue;
                    }
                    sets[j].push(RecoverySet {
                        abscissae: positions
                            .iter()
                            .map(|&i| points.point(i)[axis.vary])
                            .collect(),
                        target: points.point(j)[axis.vary],
                        positions,
                        basis: axis.basis.clone(),
                    });
                }
            }
        }
        dropped.sort_by_key(|d| (d.position, d.axis));
        RecoveryStructure { sets, dropped }
    }

    /// Row sets I x {j} and column sets {i} x J under position i * n2 + j.
    pub fn product(a: &RecoveryStructure, b: &RecoveryStructure) -> RecoveryStructure {
        let (n1, n2) = (a.n(), b.n());
        let mut sets = vec![Vec::new(); n1 * n2];
        for i in 0..n1 {
            for j in 0..n2 {
                let here = &mut sets[i * n2 + j];
                for s in &a.sets[i] {
                    here.push(RecoverySet {
                        positions: s.positions.iter().map(|&p| p * n2 + j).collect(),
                        ..s.clone()
                    });
                }
                for s in &b.sets[j] {
                    here.push(RecoverySet {
                        positions: s.positions.iter().map(|&p| i * n2 + p).collect(),
                        ..s.clone()
                    });
                }
            }
        }
        RecoveryStructure {
            sets,
            dropped: Vec::new(),
        }
    }

    /// Distinct recovery-set sizes over all positions.
    pub fn localities(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .sets
            .iter()
            .flatten()
            .map(|s| s.positions.len())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Checks the structural invariants: j not in its sets, sets pairwise
    /// disjoint, abscissae distinct within a set. Returns the offending positions.
    pub fn structural_faults(&self) -> Vec<usize> {
        (0..self.n())
            .filter(|&j| {
                let sets = &self.sets[j];
                let mut seen = std::collections::HashSet::new();
                sets.iter().any(|s| {
                    s.positions.contains(&j)
                        || s.positions.iter().any(|&p| !seen.insert(p))
                        || s.positions.len() != s.abscissae.len()
                        || {
                            let mut a = s.abscissae.clone();
                            a.sort_unstable();
                            a.dedup();
                            a.len() != s.abscissae.len() && s.basis != InterpBasis::ZeroSum
                        }
                })
            })
            .collect()
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(SIDECAR_MAGIC);
        out.push(SIDECAR_VERSION);
        out.extend_from_slice(&(self.n() as u32).to_le_bytes());
        for sets in &self.sets {
            out.extend_from_slice(&(sets.len() as u16).to_le_bytes());
            for s in sets {
                out.extend_from_slice(&(s.positions.len() as u32).to_le_bytes());
                for (&p, &a) in s.positions.iter().zip(&s.abscissae) {
                    out.extend_from_slice(&(p as u32).to_le_bytes());
                    out.extend_from_slice(&(a as u16).to_le_bytes());
                }
                out.extend_from_slice(&(s.target as u16).to_le_bytes());
                match &s.basis {
                    InterpBasis::Degree(d) => {
                        out.push(0);
                        out.extend_from_slice(&(*d as u16).to_le_bytes());
                    }
                    InterpBasis::Exponents(e) => {
                        out.push(1);
                        out.extend_from_slice(&(e.len() as u16).to_le_bytes());
                        for &x in e {
                            out.extend_from_slice(&(x as u16).to_le_bytes());
                        }
                    }
                    InterpBasis::ZeroSum => out.push(2),
                }
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<RecoveryStructure> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(4)? != SIDECAR_MAGIC {
            return Err(Error::FormatError("missing LRCS magic".into()));
        }
        if r.u8()? != SIDECAR_VERSION {
            return Err(Error::FormatError("unsupported sidecar version".into()));
        }
        let n = r.u32()? as usize;
        let mut sets = Vec::with_capacity(n);
        for _ in 0..n {
            let count = r.u16()? as usize;
            let mut here = Vec::with_capacity(count);
            for _ in 0..count {
                let len = r.u32()? as usize;
                let mut positions = Vec::with_capacity(len);
                let mut abscissae = Vec::with_capacity(len);
                for _ in 0..len {
                    let p = r.u32()? as usize;
                    if p >= n {
                        return Err(Error::FormatError(format!("position {p} out of range")));
                    }
                    positions.push(p);
                    abscissae.push(r.u16()? as Elem);
                }
                let target = r.u16()? as Elem;
                let basis = match r.u8()? {
                    0 => InterpBasis::Degree(r.u16()? as u32),
                    1 => {
                        let c = r.u16()? as usize;
                        InterpBasis::Exponents(
                            (0..c)
                                .map(|_| r.u16().map(u32::from))
                                .collect::<Result<_>>()?,
                        )
                    }
                    2 => InterpBasis::ZeroSum,
                    t => return Err(Error::FormatError(format!("unknown basis tag {t}"))),
                };
                here.push(RecoverySet {
                    positions,
                    abscissae,
                    target,
                    basis,
                });
            }
            sets.push(here);
        }
        if r.pos != bytes.len() {
            return Err(Error::FormatError("trailing bytes in sidecar".into()));
        }
        Ok(RecoveryStructure {
            sets,
            dropped: Vec::new(),
        })
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let s = self
            .bytes
            .get(self.pos..self.pos + n)
            .ok_or_else(|| Error::FormatError("truncated sidecar".into()))?;
        self.pos += n;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_le_bytes(self.take(2)?.try_into().unwrap()))
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}

/// True iff some dual codeword is supported in `set` plus `j` and nonzero at `j`,
/// i.e. column j of the generator lies in the span of the columns in `set`.
pub fn certify_recovery_set(code: &LinearCode, j: usize, set: &[usize]) -> bool {
    code.column_in_span(j, set)
}

/// For a code given by its parity-check code `check` (the code is check's dual):
/// the indicator of `set` plus `j` must itself be a check word.
pub fn certify_zero_sum(check: &LinearCode, j: usize, set: &[usize]) -> bool {
    let mut w = vec![0; check.n()];
    w[j] = 1;
    for &p in set {
        w[p] = 1;
    }
    check.is_codeword(&w).unwrap_or(false)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CertifyReport {
    pub sets_checked: usize,
    /// (position, set index) pairs that failed.
    pub failures: Vec<(usize, usize)>,
    pub structural_faults: Vec<usize>,
    pub availability: Vec<usize>,
}

impl CertifyReport {
    pub fn all_certified(&self) -> bool {
        self.failures.is_empty() && self.structural_faults.is_empty()
    }

    pub fn min_availability(&self) -> usize {
        self.availability.iter().copied().min().unwrap_or(0)
    }
}

/// Certifies every set of the structure against the code.
pub fn certify_structure(code: &LinearCode, structure: &RecoveryStructure) -> CertifyReport {
    certify_with(structure, |j, s| match s.basis {
        InterpBasis::ZeroSum => {
            // a zero-sum parity is a dual word; test it directly
            let mut h = vec![0; code.n()];
            h[j] = 1;
            for &p in &s.positions {
                h[p] = 1;
            }
            code.generator()
                .row_iter()
                .all(|row| dot(&code.field, row, &h) == 0)
        }
        _ => certify_recovery_set(code, j, &s.positions),
    })
}

/// Certifies a structure of zero-sum sets for the dual of `check`.
pub fn certify_structure_dual(check: &LinearCode, structure: &RecoveryStructure) -> CertifyReport {
    certify_with(structure, |j, s| {
        s.basis == InterpBasis::ZeroSum && certify_zero_sum(check, j, &s.positions)
    })
}

fn certify_with(
    structure: &RecoveryStructure,
    test: impl Fn(usize, &RecoverySet) -> bool + Sync,
) -> CertifyReport {
    let failures: Vec<(usize, usize)> = (0..structure.n())
        .into_par_iter()
        .flat_map_iter(|j| {
            structure.sets[j]
                .iter()
                .enumerate()
                .filter(|(_, s)| !test(j, s))
                .map(move |(i, _)| (j, i))
                .collect::<Vec<_>>()
        })
        .collect();
    CertifyReport {
        sets_checked: structure.sets.iter().map(Vec::len).sum(),
        failures,
        structural_faults: structure.structural_faults(),
        availability: availability(structure),
    }
}

fn dot(f: &Field, row: &[u16], h: &[Elem]) -> Elem {
    row.iter()
        .zip(h)
        .filter(|(_, &b)| b != 0)
        .fold(0, |acc, (&a, &b)| f.add(acc, f.mul(a as Elem, b)))
}

/// Number of pairwise-disjoint sets per position (greedy in listed order).
pub fn availability(structure: &RecoveryStructure) -> Vec<usize> {
    structure
        .sets
        .iter()
        .map(|sets| {
            let mut used = std::collections::HashSet::new();
            sets.iter()
                .filter(|s| {
                    if s.positions.iter().any(|p| used.contains(p)) {
                        false
                    } else {
                        used.extend(s.positions.iter().copied());
                        true
                    }
                })
                .count()
        })
        .collect()
}

/// Value at `target` of the interpolant through (abscissae, values).
pub fn interpolate(
    f: &Field,
    basis: &InterpBasis,
    abscissae: &[Elem],
    values: &[Elem],
    target: Elem,
) -> Option<Elem> {
    match basis {
        InterpBasis::ZeroSum => Some(values.iter().fold(0, |acc, &v| f.sub(acc, v))),
        InterpBasis::Degree(d) => {
            let used = *d as usize + 1;
            if abscissae.len() < used {
                return None;
            }
            let (xs, ys) = (&abscissae[..used], &values[..used]);
            let mut acc = 0;
            for (i, (&xi, &yi)) in xs.iter().zip(ys).enumerate() {
                let mut num = 1;
                let mut den = 1;
                for (k, &xk) in xs.iter().enumerate() {
                    if k != i {
                        num = f.mul(num, f.sub(target, xk));
                        den = f.mul(den, f.sub(xi, xk));
                    }
                }
                let w = f.div(num, den).ok()?;
                acc = f.add(acc, f.mul(yi, w));
            }
            Some(acc)
        }
        InterpBasis::Exponents(exps) => {
            let mut v = Matrix::zeros(abscissae.len(), exps.len());
            for (r, &x) in abscissae.iter().enumerate() {
                for (c, &e) in exps.iter().enumerate() {
                    v.set(r, c, f.pow(x, e as u64));
                }
            }
            // the solution must be unique for the value at target to be determined
            if v.clone().rank(f) < exps.len() {
                return None;
            }
            let coeffs = v.solve(f, values)?;
            Some(exps.iter().zip(&coeffs).fold(0, |acc, (&e, &c)| {
                f.add(acc, f.mul(c, f.pow(target, e as u64)))
            }))
        }
    }
}

/// Repairs erased position `j` from the smallest recovery set free of erasures.
pub fn repair(
    f: &Field,
    structure: &RecoveryStructure,
    word: &[Option<Elem>],
    j: usize,
) -> Result<Elem> {
    let mut candidates: Vec<&RecoverySet> = structure.sets[j]
        .iter()
        .filter(|s| s.positions.iter().all(|&p| word[p].is_some()))
        .collect();
    candidates.sort_by_key(|s| s.positions.len());
    let set = candidates.first().ok_or(Error::AllRecoverySetsErased(j))?;
    repair_with(f, set, word, j)
}

/// Repairs `j` from one specific set.
pub fn repair_with(f: &Field, set: &RecoverySet, word: &[Option<Elem>], j: usize) -> Result<Elem> {
    let values: Vec<Elem> = set
        .positions
        .iter()
        .map(|&p| word[p].ok_or(Error::AllRecoverySetsErased(j)))
        .collect::<Result<_>>()?;
    interpolate(f, &set.basis, &set.abscissae, &values, set.target)
        .ok_or(Error::SingularInterpolation(j))
}

/// Result of repairing several erasures at once.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepairOutcome {
    /// (position, value, symbols read).
    pub recovered: Vec<(usize, Elem, usize)>,
    pub unrecovered: Vec<usize>,
}

/// Repairs erasures in rounds, each round using only symbols present at its
/// start, until no erased position has an erasure-free set left.
pub fn repair_all(
    f: &Field,
    structure: &RecoveryStructure,
    word: &mut [Option<Elem>],
) -> RepairOutcome {
    let mut out = RepairOutcome::default();
    let mut erased: Vec<usize> = (0..word.len()).filter(|&j| word[j].is_none()).collect();
    loop {
        let snapshot = word.to_vec();
        let mut progress = false;
        erased.retain(|&j| {
            let mut sets: Vec<&RecoverySet> = structure.sets[j]
                .iter()
                .filter(|s| s.positions.iter().all(|&p| snapshot[p].is_some()))
                .collect();
            sets.sort_by_key(|s| s.positions.len());
            for set in sets {
                if let Ok(v) = repair_with(f, set, &snapshot, j) {
                    word[j] = Some(v);
                    out.recovered.push((j, v, set.positions.len()));
                    progress = true;
                    return false;
                }
            }
            true
        });
        if !progress || erased.is_empty() {
            break;
        }
    }
    out.unrecovered = erased;
    out
}
