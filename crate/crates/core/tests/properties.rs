use lrc_core::analysis::{min_distance_exhaustive, DEFAULT_BUDGET};
use lrc_core::codes::{evaluate_code, product_code, LinearCode};
use lrc_core::construct::{self, Built};
use lrc_core::curves::CurvePointSet;
use lrc_core::funcspace::{FunctionSet, FunctionTerm, Var};
use lrc_core::gf::{Elem, Field, FieldRef};
use lrc_core::locality::{self, repair_all, repair_with, RecoveryStructure};
use lrc_core::matrix::Matrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_code(f: &FieldRef, k: usize, n: usize, seed: u64) -> LinearCode {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..k * n)
        .map(|_| rng.gen_range(0..f.order()) as u16)
        .collect();
    LinearCode::from_generator(f.clone(), Matrix::from_flat(k, n, data), "random")
}

fn exact(c: &LinearCode) -> usize {
    min_distance_exhaustive(c, DEFAULT_BUDGET, None)
        .unwrap()
        .exact
        .unwrap()
}

fn monomials(var: Var, exps: &[u32]) -> FunctionSet {
    FunctionSet::from_terms(
        "m",
        exps.iter()
            .map(|&e| FunctionTerm::monomial(&[(var, e)]))
            .collect(),
    )
}

fn small_builds() -> Vec<Built> {
    let tb = lrc_core::analysis::tb16_codes().unwrap();
    vec![
        construct::build_hermitian(4, 20, None, None, true).unwrap(),
        construct::build_product(&[tb[1].clone(), tb[2].clone()]).unwrap(),
        lrc_core::analysis::tb27_codes().unwrap().remove(8),
        construct::SuzukiAffineContext::new(8, None, None, &None)
            .unwrap()
            .build(30)
            .unwrap(),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn product_dimension_and_distance_multiply(
        k1 in 1usize..=2, k2 in 1usize..=2, n1 in 3usize..7, n2 in 3usize..7, seed in any::<u64>()
    ) {
        let f = Field::of_order(8).unwrap();
        let a = random_code(&f, k1, n1, seed);
        let b = random_code(&f, k2, n2, seed ^ 0x9e37);
        let p = product_code(&a, &b).unwrap();
        prop_assert_eq!(p.k(), a.k() * b.k());
        prop_assert_eq!(exact(&p), exact(&a) * exact(&b));
    }

    #[test]
    fn tensor_span_is_product_code(
        e1 in proptest::collection::btree_set(0u32..12, 1..4),
        e2 in proptest::collection::btree_set(0u32..12, 1..4),
        m1 in 2usize..=16, m2 in 2usize..=16,
    ) {
        let f = Field::of_order(16).unwrap();
        let elems: Vec<Elem> = f.elements().collect();
        let p1 = CurvePointSet::line(&f, Var::X, &elems[..m1]);
        let p2 = CurvePointSet::line(&f, Var::Y, &elems[16 - m2..]);
        let f1 = monomials(Var::X, &e1.into_iter().collect::<Vec<_>>());
        let f2 = monomials(Var::Y, &e2.into_iter().collect::<Vec<_>>());
        let c1 = evaluate_code(&p1, &f1).unwrap();
        let c2 = evaluate_code(&p2, &f2).unwrap();
        let grid = p1.product(&p2).unwrap();
        let direct = evaluate_code(&grid, &f1.tensor(&f2).unwrap()).unwrap();
        prop_assert!(direct.same_code(&product_code(&c1, &c2).unwrap()));
    }

    #[test]
    fn distance_invariant_under_permutation(seed in any::<u64>()) {
        let f = Field::of_order(8).unwrap();
        let c = random_code(&f, 3, 9, seed);
        let mut perm: Vec<usize> = (0..9).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for i in (1..9).rev() {
            perm.swap(i, rng.gen_range(0..=i));
        }
        prop_assert_eq!(exact(&c), exact(&c.permuted(&perm)));
    }

    #[test]
    fn dual_codewords_are_orthogonal(k in 0usize..7, seed in any::<u64>()) {
        let f = Field::of_order(27).unwrap();
        let c = random_code(&f, k, 10, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = c.random_dual_codeword(&mut rng);
        prop_assert!(c.dual().is_codeword(&w).unwrap());
        prop_assert!(c.is_codeword(&c.random_codeword(&mut rng)).unwrap());
    }
}

#[test]
fn built_codes_round_trip() {
    for b in small_builds() {
        let bytes = b.code.to_bytes();
        let back = LinearCode::from_bytes(&bytes).unwrap();
        assert_eq!(back.generator(), b.code.generator(), "{}", b.label);
        assert_eq!(back.to_bytes(), bytes);
        let side = b.structure.to_bytes();
        assert_eq!(
            RecoveryStructure::from_bytes(&side).unwrap().sets,
            b.structure.sets,
            "{}",
            b.label
        );
    }
}

#[test]
fn every_set_repairs_every_position() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for b in small_builds() {
        assert!(
            locality::certify_structure(&b.code, &b.structure).all_certified(),
            "{}",
            b.label
        );
        let f = &b.code.field;
        for _ in 0..20 {
            let c = b.code.random_codeword(&mut rng);
            let mut w: Vec<Option<Elem>> = c.iter().map(|&x| Some(x)).collect();
            for j in 0..b.n() {
                w[j] = None;
                for set in &b.structure.sets[j] {
                    assert_eq!(
                        repair_with(f, set, &w, j),
                        Ok(c[j]),
                        "{} position {j}",
                        b.label
                    );
                }
                w[j] = Some(c[j]);
            }
        }
    }
}

#[test]
fn sets_of_a_position_are_disjoint() {
    for b in small_builds() {
        assert!(b.structure.structural_faults().is_empty(), "{}", b.label);
    }
}

#[test]
fn erasing_every_set_of_a_position_is_reported() {
    let b = construct::build_hermitian(4, 20, None, None, true).unwrap();
    let j = (0..b.n())
        .find(|&j| b.structure.sets[j].len() == 2)
        .unwrap();
    let c = b.code.random_codeword(&mut ChaCha8Rng::seed_from_u64(1));
    let mut w: Vec<Option<Elem>> = c.iter().map(|&x| Some(x)).collect();
    w[j] = None;
    for s in &b.structure.sets[j] {
        w[s.positions[0]] = None;
    }
    assert!(matches!(
        locality::repair(&b.code.field, &b.structure, &w, j),
        Err(lrc_core::error::Error::AllRecoverySetsErased(_))
    ));
    // the helpers' other sets may still bring the position back in a later round
    let out = repair_all(&b.code.field, &b.structure, &mut w);
    for &(p, v, _) in &out.recovered {
        assert_eq!(v, c[p]);
    }
}

#[test]
#[ignore = "dense elimination of a ~2700 x 19683 matrix over F_27"]
fn ree_dual_check_rank_matches_dense_rank() {
    let b = construct::build_ree_dual(27, 19083).unwrap();
    assert_eq!(
        b.code.k(),
        construct::ree_dual_check_rank(27, 19083).unwrap()
    );
}
