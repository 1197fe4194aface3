//! Linear codes in reduced row echelon form, evaluation codes, and the code
//! algebra (product, sum, intersection, dual).

use std::collections::BTreeMap;

use log::warn;
use rand::Rng;

use crate::curves::CurvePointSet;
use crate::error::{Error, Result};
use crate::funcspace::FunctionSet;
use crate::gf::{Elem, Field, FieldRef};
use crate::matrix::Matrix;

const MAGIC: &[u8; 4] = b"LRCC";
const FORMAT_VERSION: u8 = 1;

#[derive(Debug, Clone)]
pub struct LinearCode {
    pub field: FieldRef,
    /// Generator in reduced row echelon form with exactly k rows.
    gen: Matrix,
    pivots: Vec<usize>,
    pub provenance: String,
    /// Number of spanning vectors the code was built from, before reduction.
    pub spanning_count: usize,
}

impl LinearCode {
    /// Row-reduces `gen` and keeps its row space.
    pub fn from_generator(
        field: FieldRef,
        mut gen: Matrix,
        provenance: impl Into<String>,
    ) -> LinearCode {
        let spanning_count = gen.rows();
        let pivots = gen.rref(&field);
        LinearCode {
            field,
            gen,
            pivots,
            provenance: provenance.into(),
            spanning_count,
        }
    }

    pub fn n(&self) -> usize {
        self.gen.cols()
    }

    pub fn k(&self) -> usize {
        self.gen.rows()
    }

    pub fn generator(&self) -> &Matrix {
        &self.gen
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn repetition(field: FieldRef, n: usize) -> LinearCode {
        LinearCode::from_generator(
            field,
            Matrix::from_flat(1, n, vec![1; n]),
            format!("repetition({n})"),
        )
    }

    pub fn encode(&self, message: &[Elem]) -> Result<Vec<Elem>> {
        if message.len() != self.k() {
            return Err(Error::LengthMismatch {
                expected: self.k(),
                got: message.len(),
            });
        }
        Ok(self.gen.left_mul_vec(&self.field, message))
    }

    /// Membership by reducing the word against the echelon rows.
    pub fn is_codeword(&self, word: &[Elem]) -> Result<bool> {
        if word.len() != self.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: word.len(),
            });
        }
        let f = &self.field;
        let mut w: Vec<u16> = word.iter().map(|&x| x as u16).collect();
        for (r, &p) in self.pivots.iter().enumerate() {
            let c = w[p] as Elem;
            if c != 0 {
                f.axpy(&mut w, self.gen.row(r), f.neg(c));
            }
        }
        Ok(w.iter().all(|&x| x == 0))
    }

    /// Whether column `j` lies in the span of the columns in `set`.
    pub fn column_in_span(&self, j: usize, set: &[usize]) -> bool {
        let f = &self.field;
        let base = self.gen.select_columns(set);
        let mut cols = set.to_vec();
        cols.push(j);
        let ext = self.gen.select_columns(&cols);
        // rank over the k x |set| submatrix, transposed so rows are short
        base.transpose().rank(f) == ext.transpose().rank(f)
    }

    fn same_space(&self, other: &LinearCode) -> Result<()> {
        if self.field.id() != other.field.id() {
            return Err(Error::FieldMismatch);
        }
        if self.n() != other.n() {
            return Err(Error::LengthMismatch {
                expected: self.n(),
                got: other.n(),
            });
        }
        Ok(())
    }

    pub fn sum(&self, other: &LinearCode) -> Result<LinearCode> {
        self.same_space(other)?;
        let stacked = self.gen.vstack(&other.gen);
        Ok(LinearCode::from_generator(
            self.field.clone(),
            stacked,
            format!("sum({}, {})", self.provenance, other.provenance),
        ))
    }

    pub fn dual(&self) -> LinearCode {
        let h = self.gen.nullspace_of_rref(&self.field, &self.pivots);
        LinearCode::from_generator(self.field.clone(), h, format!("dual({})", self.provenance))
    }

    pub fn intersect(&self, other: &LinearCode) -> Result<LinearCode> {
        self.same_space(other)?;
        let both = self.dual().sum(&other.dual())?.dual();
        Ok(LinearCode {
            provenance: format!("intersect({}, {})", self.provenance, other.provenance),
            ..both
        })
    }

    /// Equality of row spaces.
    pub fn same_code(&self, other: &LinearCode) -> bool {
        self.field.id() == other.field.id() && self.gen == other.gen
    }

    /// Applies a coordinate permutation: new position i holds old position perm[i].
    pub fn permuted(&self, perm: &[usize]) -> LinearCode {
        LinearCode::from_generator(
            self.field.clone(),
            self.gen.select_columns(perm),
            format!("permuted({})", self.provenance),
        )
    }

    /// Uniformly random codeword.
    pub fn random_codeword<R: Rng>(&self, rng: &mut R) -> Vec<Elem> {
        let q = self.field.order();
        let msg: Vec<Elem> = (0..self.k()).map(|_| rng.gen_range(0..q)).collect();
        self.gen.left_mul_vec(&self.field, &msg)
    }

    /// Uniformly random word of the dual code: free coordinates at random, the
    /// pivot coordinates solved from the echelon rows.
    pub fn random_dual_codeword<R: Rng>(&self, rng: &mut R) -> Vec<Elem> {
        let f = &self.field;
        let mut is_pivot = vec![false; self.n()];
        for &p in &self.pivots {
            is_pivot[p] = true;
        }
        let mut w: Vec<Elem> = is_pivot
            .iter()
            .map(|&p| if p { 0 } else { rng.gen_range(0..f.order()) })
            .collect();
        for (r, &p) in self.pivots.iter().enumerate() {
            let s = self
                .gen
                .row(r)
                .iter()
                .zip(&w)
                .zip(&is_pivot)
                .filter(|((&h, _), &piv)| h != 0 && !piv)
                .fold(0, |acc, ((&h, &x), _)| f.add(acc, f.mul(h as Elem, x)));
            w[p] = f.neg(s);
        }
        w
    }

    /// Bit-exact serialization.
    pub fn to_bytes(&self) -> Vec<u8> {
        let f = &self.field;
        let wide = f.order() > 256;
        let mut out = Vec::with_capacity(16 + self.k() * self.n() * if wide { 2 } else { 1 });
        out.extend_from_slice(MAGIC);
        out.push(FORMAT_VERSION);
        out.push(f.p() as u8);
        out.push(f.m() as u8);
        out.extend(f.modulus().iter().map(|&c| c as u8));
        out.extend_from_slice(&(self.n() as u32).to_le_bytes());
        out.extend_from_slice(&(self.k() as u32).to_le_bytes());
        for &x in self.gen.data() {
            if wide {
                out.extend_from_slice(&x.to_le_bytes());
            } else {
                out.push(x as u8);
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<LinearCode> {
        let bad = |msg: &str| Error::FormatError(msg.to_string());
        if bytes.len() < 7 || &bytes[..4] != MAGIC {
            return Err(bad("missing LRCC magic"));
        }
        if bytes[4] != FORMAT_VERSION {
            return Err(bad("unsupported format version"));
        }
        let (p, m) = (bytes[5] as u32, bytes[6] as u32);
        let mut pos = 7;
        let modulus: Vec<u32> = bytes
            .get(pos..pos + m as usize + 1)
            .ok_or_else(|| bad("truncated modulus"))?
            .iter()
            .map(|&c| c as u32)
            .collect();
        pos += m as usize + 1;
        let field = Field::new(p, m, &modulus).map_err(|e| bad(&e.to_string()))?;
        let read_u32 = |at: usize| -> Result<u32> {
            let s = bytes
                .get(at..at + 4)
                .ok_or_else(|| bad("truncated header"))?;
            Ok(u32::from_le_bytes(s.try_into().unwrap()))
        };
        let n = read_u32(pos)? as usize;
        let k = read_u32(pos + 4)? as usize;
        pos += 8;
        let wide = field.order() > 256;
        let width = if wide { 2 } else { 1 };
        let body = &bytes[pos..];
        if body.len() != k * n * width {
            return Err(bad("body length does not match n and k"));
        }
        let data: Vec<u16> = if wide {
            body.chunks(2)
                .map(|c| u16::from_le_bytes([c[0], c[1]]))
                .collect()
        } else {
            body.iter().map(|&b| b as u16).collect()
        };
        if data.iter().any(|&x| x as u32 >= field.order()) {
            return Err(bad("element out of range"));
        }
        let gen = Matrix::from_flat(k, n, data);
        let code = LinearCode::from_generator(field, gen.clone(), "loaded");
        if code.gen != gen {
            return Err(bad("generator is not in reduced row echelon form"));
        }
        Ok(code)
    }
}

/// Evaluates every function at every point and row-reduces.
pub fn evaluate_code(points: &CurvePointSet, functions: &FunctionSet) -> Result<LinearCode> {
    let rows = functions.evaluate(points)?;
    let code = LinearCode::from_generator(
        points.field.clone(),
        rows,
        format!("ev[{} points]({})", points.len(), functions.provenance),
    );
    if code.k() < functions.len() {
        warn!(
            "{}: rank {} below the {} functions evaluated",
            code.provenance,
            code.k(),
            functions.len()
        );
    }
    Ok(code)
}

/// Product code with row-major positions (i, j) -> i * n2 + j.
///
/// The Kronecker product of two reduced echelon generators is again in reduced
/// echelon form, so no elimination is needed.
pub fn product_code(c1: &LinearCode, c2: &LinearCode) -> Result<LinearCode> {
    if c1.field.id() != c2.field.id() {
        return Err(Error::FieldMismatch);
    }
    let f = &c1.field;
    let (n1, n2) = (c1.n(), c2.n());
    let (k1, k2) = (c1.k(), c2.k());
    let mut data = vec![0u16; k1 * k2 * n1 * n2];
    for a in 0..k1 {
        let ra = c1.gen.row(a);
        for b in 0..k2 {
            let rb = c2.gen.row(b);
            let row = &mut data[(a * k2 + b) * n1 * n2..(a * k2 + b + 1) * n1 * n2];
            for (i, &x) in ra.iter().enumerate() {
                if x != 0 {
                    let seg = &mut row[i * n2..(i + 1) * n2];
                    f.axpy(seg, rb, x as Elem);
                }
            }
        }
    }
    let mut pivots = Vec::with_capacity(k1 * k2);
    for &pa in &c1.pivots {
        for &pb in &c2.pivots {
            pivots.push(pa * n2 + pb);
        }
    }
    Ok(LinearCode {
        field: c1.field.clone(),
        gen: Matrix::from_flat(k1 * k2, n1 * n2, data),
        pivots,
        provenance: format!("product({}, {})", c1.provenance, c2.provenance),
        spanning_count: k1 * k2,
    })
}

/// Sparse vector keyed by coordinate, used for coefficient-space elimination.
pub type SparseVec = BTreeMap<u32, Elem>;

/// Rank of a family of sparse vectors, eliminating on the largest coordinate.
pub fn sparse_rank(f: &Field, vectors: impl IntoIterator<Item = SparseVec>) -> usize {
    let mut basis: BTreeMap<u32, SparseVec> = BTreeMap::new();
    for mut v in vectors {
        while let Some((&lead, &c)) = v.iter().next_back() {
            let Some(b) = basis.get(&lead) else {
                let inv = f.inv(c).expect("stored coordinates are nonzero");
                for x in v.values_mut() {
                    *x = f.mul(*x, inv);
                }
                basis.insert(lead, v);
                break;
            };
            for (&key, &y) in b {
                let cur = v.get(&key).copied().unwrap_or(0);
                let nv = f.sub(cur, f.mul(c, y));
                if nv == 0 {
                    v.remove(&key);
                } else {
                    v.insert(key, nv);
                }
            }
        }
    }
    basis.len()
}

/// Coefficient vector of a term as a polynomial in `vars`, with exponents reduced
/// by x^q = x. Monomials with exponents below q are a basis of the functions on
/// all of F_q^d, so ranks of these vectors equal evaluation ranks on F_q^d.
pub fn term_coefficients(
    f: &Field,
    fs: &FunctionSet,
    term: &crate::funcspace::FunctionTerm,
    vars: &[crate::funcspace::Var],
) -> Result<SparseVec> {
    let q = f.order() as u64;
    if term.denom_exp > 0 {
        return Err(Error::MissingConstraint(
            "denominators have no polynomial form".into(),
        ));
    }
    let reduce = |e: u64| if e == 0 { 0 } else { (e - 1) % (q - 1) + 1 };
    let mul = |a: &[Elem], b: &[Elem]| -> Vec<Elem> {
        let mut out = vec![0; q as usize];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                if y != 0 {
                    let e = reduce((i + j) as u64) as usize;
                    out[e] = f.add(out[e], f.mul(x, y));
                }
            }
        }
        out
    };
    let mut acc: SparseVec = BTreeMap::from([(0u32, 1)]);
    for v in crate::funcspace::ALL_VARS {
        let uses = term.exp(v) > 0 || term.good.iter().any(|g| g.var == v);
        let Some(slot) = vars.iter().position(|&w| w == v) else {
            if uses {
                return Err(Error::MissingConstraint(format!(
                    "variable {v} outside the coefficient space"
                )));
            }
            continue;
        };
        let mut uni = vec![0; q as usize];
        uni[reduce(term.exp(v) as u64) as usize] = 1;
        for g in term.good.iter().filter(|g| g.var == v) {
            let mut gp = vec![0; q as usize];
            for &(e, c) in &fs.polys[g.poly].coeffs {
                let e = reduce(e) as usize;
                gp[e] = f.add(gp[e], c);
            }
            for _ in 0..g.exp {
                uni = mul(&uni, &gp);
            }
        }
        let stride = (q as u32).pow((vars.len() - 1 - slot) as u32);
        let mut next = SparseVec::new();
        for (&key, &c) in &acc {
            for (e, &u) in uni.iter().enumerate() {
                if u != 0 {
                    let k = key + e as u32 * stride;
                    let val = f.add(next.get(&k).copied().unwrap_or(0), f.mul(c, u));
                    if val == 0 {
                        next.remove(&k);
                    } else {
                        next.insert(k, val);
                    }
                }
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Rank of the evaluation of `fs` on all of F_q^vars, computed in coefficient space.
pub fn coefficient_rank(
    f: &Field,
    fs: &FunctionSet,
    vars: &[crate::funcspace::Var],
) -> Result<usize> {
    let vecs = fs
        .terms
        .iter()
        .map(|t| term_coefficients(f, fs, t, vars))
        .collect::<Result<Vec<_>>>()?;
    Ok(sparse_rank(f, vecs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::CurvePointSet;
    use crate::funcspace::{FunctionTerm, Var};
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn rs_code(f: &FieldRef, n: usize, k: usize) -> LinearCode {
        let pts: Vec<Elem> = f.elements().take(n).collect();
        let line = CurvePointSet::line(f, Var::X, &pts);
        let fs = FunctionSet::from_terms(
            "rs",
            (0..k)
                .map(|i| FunctionTerm::monomial(&[(Var::X, i as u32)]))
                .collect(),
        );
        evaluate_code(&line, &fs).unwrap()
    }

    fn random_code(f: &FieldRef, k: usize, n: usize, seed: u64) -> LinearCode {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data = (0..k * n)
            .map(|_| rng.gen_range(0..f.order()) as u16)
            .collect();
        LinearCode::from_generator(f.clone(), Matrix::from_flat(k, n, data), "random")
    }

    #[test]
    fn constant_function_gives_repetition_code() {
        let f = Field::of_order(16).unwrap();
        let c = rs_code(&f, 10, 1);
        assert_eq!(c.k(), 1);
        assert!(c.same_code(&LinearCode::repetition(f, 10)));
    }

    #[test]
    fn encode_zero_and_membership() {
        let f = Field::of_order(16).unwrap();
        let c = rs_code(&f, 8, 2);
        assert_eq!(c.encode(&[0, 0]).unwrap(), vec![0; 8]);
        let w = c.encode(&[3, 7]).unwrap();
        assert!(c.is_codeword(&w).unwrap());
        let mut bad = w.clone();
        bad[5] = f.add(bad[5], 1);
        assert!(!c.is_codeword(&bad).unwrap());
        assert!(matches!(c.encode(&[1]), Err(Error::LengthMismatch { .. })));
    }

    #[test]
    fn product_of_rs_codes() {
        let f = Field::of_order(16).unwrap();
        let c = rs_code(&f, 8, 2);
        let p = product_code(&c, &c).unwrap();
        assert_eq!((p.n(), p.k()), (64, 4));
        // the Kronecker generator is already reduced
        let again = LinearCode::from_generator(f.clone(), p.generator().clone(), "check");
        assert_eq!(again.generator(), p.generator());
        assert_eq!(again.pivots(), p.pivots());
    }

    #[test]
    fn product_with_trivial_factor() {
        let f = Field::of_order(8).unwrap();
        let c = rs_code(&f, 7, 3);
        let one = LinearCode::repetition(f.clone(), 1);
        assert!(product_code(&c, &one).unwrap().same_code(&c));
    }

    #[test]
    fn serialization_round_trip() {
        for order in [8u64, 27, 4096] {
            let f = Field::of_order(order).unwrap();
            let c = random_code(&f, 3, 11, order);
            let bytes = c.to_bytes();
            let back = LinearCode::from_bytes(&bytes).unwrap();
            assert_eq!(back.to_bytes(), bytes);
            assert_eq!(back.generator(), c.generator());
        }
    }

    #[test]
    fn serialization_header_layout() {
        let f = Field::of_order(8).unwrap();
        let c = rs_code(&f, 4, 1);
        let b = c.to_bytes();
        assert_eq!(&b[..4], b"LRCC");
        assert_eq!(&b[4..7], &[1, 2, 3]);
        assert_eq!(&b[7..11], &[1, 1, 0, 1]);
        assert_eq!(&b[11..15], &4u32.to_le_bytes());
        assert_eq!(&b[15..19], &1u32.to_le_bytes());
        assert_eq!(b.len(), 19 + 4);
        assert!(matches!(
            LinearCode::from_bytes(&b[..10]),
            Err(Error::FormatError(_))
        ));
    }

    #[test]
    fn mismatched_spaces_rejected() {
        let f8 = Field::of_order(8).unwrap();
        let f16 = Field::of_order(16).unwrap();
        let a = rs_code(&f8, 6, 2);
        assert!(matches!(
            a.sum(&rs_code(&f16, 6, 2)),
            Err(Error::FieldMismatch)
        ));
        assert!(matches!(
            a.sum(&rs_code(&f8, 7, 2)),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn coefficient_rank_matches_evaluation_rank() {
        let f = Field::of_order(9).unwrap();
        let gp = crate::funcspace::tb_partition(&f, crate::funcspace::GoodKind::Trace, 2).unwrap();
        let fx = crate::funcspace::tb_functions(&gp, Var::X, 9, None);
        let fy = fx.rename(Var::X, Var::Y);
        let mut fs = fx.tensor(&fy).unwrap();
        fs.push(FunctionTerm::monomial(&[(Var::X, 10)]));
        let pts = CurvePointSet::affine_space(&f, &[Var::X, Var::Y]);
        let dense = evaluate_code(&pts, &fs).unwrap().k();
        assert_eq!(coefficient_rank(&f, &fs, &[Var::X, Var::Y]).unwrap(), dense);
    }

    #[test]
    fn sparse_rank_matches_dense() {
        let f = Field::of_order(27).unwrap();
        let c = random_code(&f, 5, 9, 3);
        let mut rows: Vec<Vec<u16>> = c.generator().row_iter().map(|r| r.to_vec()).collect();
        rows.push(
            rows[0]
                .iter()
                .zip(&rows[1])
                .map(|(&a, &b)| f.add(a as Elem, b as Elem) as u16)
                .collect(),
        );
        let sparse = rows.iter().map(|r| {
            r.iter()
                .enumerate()
                .filter(|(_, &x)| x != 0)
                .map(|(i, &x)| (i as u32, x as Elem))
                .collect::<SparseVec>()
        });
        assert_eq!(sparse_rank(&f, sparse), 5);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(30))]

        #[test]
        fn dual_is_an_involution(k in 0usize..6, n in 6usize..12, seed in any::<u64>()) {
            let f = Field::of_order(16).unwrap();
            let c = random_code(&f, k, n, seed);
            let d = c.dual();
            prop_assert_eq!(c.k() + d.k(), n);
            prop_assert!(c.generator().mul(&f, &d.generator().transpose()).is_zero());
            prop_assert!(d.dual().same_code(&c));
        }

        #[test]
        fn dimension_formula(k1 in 0usize..6, k2 in 0usize..6, seed in any::<u64>()) {
            let f = Field::of_order(8).unwrap();
            let a = random_code(&f, k1, 9, seed);
            let b = random_code(&f, k2, 9, seed.wrapping_add(1));
            let s = a.sum(&b).unwrap();
            let i = a.intersect(&b).unwrap();
            prop_assert_eq!(s.k() + i.k(), a.k() + b.k());
            prop_assert!(a.intersect(&a).unwrap().same_code(&a));
        }

        #[test]
        fn row_order_does_not_change_rank(seed in any::<u64>()) {
            let f = Field::of_order(27).unwrap();
            let pts: Vec<Elem> = f.elements().collect();
            let line = CurvePointSet::line(&f, Var::X, &pts);
            let mut terms: Vec<FunctionTerm> = (0..6).map(|i| FunctionTerm::monomial(&[(Var::X, (i * 5) % 27)])).collect();
            let base = evaluate_code(&line, &FunctionSet::from_terms("a", terms.clone())).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            for i in (1..terms.len()).rev() {
                terms.swap(i, rng.gen_range(0..=i));
            }
            let shuffled = evaluate_code(&line, &FunctionSet::from_terms("b", terms)).unwrap();
            prop_assert!(shuffled.same_code(&base));
        }
    }
}
