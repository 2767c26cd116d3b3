mod common;

use std::collections::BTreeSet;

use lmtopo::certifier::{certify, verify, Verdict};
use lmtopo::collapse::{collapse_fully, collapse_fully_randomized, elementary_collapse, free_edges};
use lmtopo::complex::EdgeIncidence;
use lmtopo::cores::{extract_core, find_tetra_boundaries, puncture, shared_face_pairs};
use lmtopo::homology::{betti, boundary2, h1_torsion, rank_mod_p, rational_rank, Coefficients};
use lmtopo::sampler::{sample, SampleSpec};
use lmtopo::{Complex2, Face};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::*;

fn sampled(n_max: usize) -> impl Strategy<Value = Complex2> {
    (3..=n_max, 0.05..0.9f64, any::<u64>())
        .prop_map(|(n, p, seed)| sample(&SampleSpec::with_p(n, p, seed)).unwrap())
}

fn face_set(c: &Complex2) -> BTreeSet<Face> {
    c.faces().iter().copied().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn degree_sum(c in small_complex(8)) {
        prop_assert_eq!(3 * c.f2(), c.incidence().total_degree());
    }

    #[test]
    fn text_round_trip(c in small_complex(8)) {
        prop_assert_eq!(Complex2::from_text(&c.to_text()).unwrap(), c);
    }

    #[test]
    fn incremental_incidence(c in small_complex(8), picks in proptest::collection::vec(any::<prop::sample::Index>(), 0..20)) {
        let mut inc = c.incidence();
        let mut faces: Vec<Face> = c.faces().to_vec();
        for pick in picks {
            if faces.is_empty() {
                break;
            }
            let f = faces.remove(pick.index(faces.len()));
            inc.remove_face(&f);
            prop_assert_eq!(&inc, &EdgeIncidence::build(&faces));
        }
    }

    #[test]
    fn collapse_order_independent(c in sampled(9), seed in any::<u64>()) {
        let terminal = face_set(&collapse_fully(&c).0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let (r, trace) = collapse_fully_randomized(&c, &mut rng);
            prop_assert_eq!(face_set(&r), terminal.clone());
            prop_assert_eq!(trace.replay(&c).unwrap(), r);
        }
    }

    #[test]
    fn collapse_steps_drop_one_face_and_one_edge(c in sampled(8)) {
        let (_, trace) = collapse_fully(&c);
        let mut cur = c.clone();
        for step in &trace.steps {
            let next = elementary_collapse(&cur, step.edge).unwrap();
            prop_assert_eq!(next.f2() + 1, cur.f2());
            prop_assert_eq!(next.f1() + 1, cur.f1());
            cur = next;
        }
    }

    #[test]
    fn terminal_residue_is_a_core(c in sampled(9)) {
        let (r, _) = collapse_fully(&c);
        prop_assert!(free_edges(&r).is_empty());
        let k = extract_core(&c);
        let inc = EdgeIncidence::build(&k.faces);
        for e in &k.edges {
            prop_assert!(inc.degree(e) >= 2);
        }
    }

    #[test]
    fn homotopy_invariance(c in small_complex_any_skeleton(8)) {
        let (r, _) = collapse_fully(&c);
        for k in [Coefficients::Rationals, Coefficients::F2] {
            prop_assert_eq!(betti(&c, k).unwrap().betti, betti(&r, k).unwrap().betti);
        }
        prop_assert_eq!(h1_torsion(&c), h1_torsion(&r));
    }

    #[test]
    fn euler_identity(c in small_complex_any_skeleton(8)) {
        for k in [Coefficients::Rationals, Coefficients::F2, Coefficients::Prime(3)] {
            let b = betti(&c, k).unwrap().betti;
            prop_assert_eq!(b[0] as i64 - b[1] as i64 + b[2] as i64, c.euler_characteristic());
        }
    }

    #[test]
    fn sparse_matches_dense(c in small_complex_any_skeleton(8)) {
        prop_assert_eq!(betti(&c, Coefficients::Rationals).unwrap().betti, betti_dense(&c, None));
        prop_assert_eq!(betti(&c, Coefficients::F2).unwrap().betti, betti_dense(&c, Some(2)));
        prop_assert_eq!(betti(&c, Coefficients::Prime(5)).unwrap().betti, betti_dense(&c, Some(5)));
    }

    #[test]
    fn torsion_matches_dense_smith(c in small_complex(7)) {
        let sparse: Vec<u64> = h1_torsion(&c).iter().map(|x| u64::try_from(x).unwrap()).collect();
        prop_assert_eq!(sparse, torsion(&c));
    }

    #[test]
    fn face_removal_drops_betti2_by_at_most_one(c in sampled(9), pick in any::<prop::sample::Index>()) {
        prop_assume!(c.f2() > 0);
        let f = c.faces()[pick.index(c.f2())];
        let b = betti(&c, Coefficients::Rationals).unwrap().betti2();
        let after = betti(&c.without_faces(&[f]), Coefficients::Rationals).unwrap().betti2();
        prop_assert!(b == after || b == after + 1);
    }

    #[test]
    fn boundaries_share_at_most_one_face(c in small_complex(7)) {
        let bs = find_tetra_boundaries(&c);
        for (i, s) in bs.iter().enumerate() {
            let fs: BTreeSet<Face> = s.faces().into_iter().collect();
            for t in &bs[i + 1..] {
                prop_assert!(t.faces().iter().filter(|f| fs.contains(f)).count() <= 1);
            }
        }
        for pair in shared_face_pairs(&bs) {
            prop_assert!(bs[pair.first].faces().contains(&pair.face));
            prop_assert!(bs[pair.second].faces().contains(&pair.face));
        }
    }

    #[test]
    fn puncture_bounds(c in small_complex(7)) {
        let bs = find_tetra_boundaries(&c);
        let (z, report) = puncture(&c, &bs);
        prop_assert!(report.removed_faces().len() <= bs.len());
        prop_assert_eq!(z.f2(), c.f2() - report.removed_faces().len());
        prop_assert!(find_tetra_boundaries(&z).is_empty());
        // every removed face sat on an intact boundary, so each one kills a 2-cycle
        let b2 = |x: &Complex2| betti(x, Coefficients::Rationals).unwrap().betti2();
        prop_assert_eq!(b2(&c), b2(&z) + report.removed_faces().len());
    }

    #[test]
    fn certificates(c in sampled(9)) {
        let cert = certify(&c);
        verify(&c, &cert).unwrap();
        prop_assert_eq!(&certify(&c), &cert);
        let bs = cert.evidence.tetra.boundaries.len();
        if bs == 0 {
            let collapsible = collapse_fully(&c).0.f2() == 0;
            prop_assert_eq!(cert.verdict == Verdict::Free, collapsible);
        }
        let b2c = betti(&c, Coefficients::Rationals).unwrap().betti2();
        prop_assert!(cert.evidence.homology_z.betti2() + bs >= b2c);
    }
}

#[test]
fn two_primes_agree_on_random_instances() {
    let primes = [2_147_483_647u64, 2_147_483_629, 2_147_483_587, 2_147_483_579, 1_000_000_007, 998_244_353];
    let mut agree = 0;
    let total = 300;
    for i in 0..total {
        let c = random_complex(i, 10);
        let m = boundary2(&c);
        let (p, q) = (primes[i as usize % 6], primes[(i as usize + 1) % 6]);
        let (a, b) = (rank_mod_p(&m, p).unwrap(), rank_mod_p(&m, q).unwrap());
        if a == b {
            agree += 1;
        }
        let r = rational_rank(&m, [p, q]).unwrap();
        assert!(r.rank == a || r.rank == b);
        assert_eq!(r.rank, rank_rational(dense_boundary(&c)));
    }
    assert!(agree * 100 >= total * 99, "{agree}/{total}");
}

const RP2: [[u64; 3]; 10] = [
    [0, 1, 2], [0, 2, 3], [0, 3, 4], [0, 4, 5], [0, 1, 5],
    [1, 2, 4], [2, 3, 5], [1, 3, 4], [2, 4, 5], [1, 3, 5],
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Relabelled projective planes with extra faces exercise nonzero torsion.
    #[test]
    fn torsion_with_projective_planes(
        perm in Just((0..8u64).collect::<Vec<_>>()).prop_shuffle(),
        extra in proptest::collection::vec(any::<bool>(), 56),
    ) {
        let mut faces: BTreeSet<[u64; 3]> = RP2
            .iter()
            .map(|f| {
                let mut g = f.map(|v| perm[v as usize]);
                g.sort_unstable();
                g
            })
            .collect();
        for (t, keep) in all_triples(8).into_iter().zip(extra) {
            if keep && faces.len() < 18 {
                faces.insert(t);
            }
        }
        let c = Complex2::new(8, faces).unwrap();
        let sparse: Vec<u64> = h1_torsion(&c).iter().map(|x| u64::try_from(x).unwrap()).collect();
        prop_assert_eq!(sparse, torsion(&c));
        prop_assert_eq!(betti(&c, Coefficients::F2).unwrap().betti, betti_dense(&c, Some(2)));
    }
}

#[test]
fn projective_plane_torsion_reference() {
    let c = Complex2::new(6, RP2).unwrap();
    assert_eq!(torsion(&c), vec![2]);
    assert_eq!(betti_dense(&c, None), [1, 0, 0]);
    assert_eq!(betti_dense(&c, Some(2)), [1, 1, 1]);
}
