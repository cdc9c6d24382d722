//! Library results against the brute-force oracle in `common::oracle`.

mod common;

use common::oracle::{self, Ring};
use common::set;
use hienergy::eigen::build_gram;
use hienergy::extract::{almost_period_check, find_configuration, nb_cover};
use hienergy::moments::{energy_k, energy_k_pair, level_sequence, mult_energy_k, product_set_size, sigma_k, t_k};
use hienergy::sets::{basis_depth_test, delta_sumset_size, diffset, magnification, sumset};
use hienergy::spectrum::{dim_exact, dissociated_test};
use hienergy::{GSet, Limits, Sign};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(group literal, ring, sample space)` pairs for the random cases.
fn spaces() -> Vec<(String, Ring, Vec<i64>)> {
    let mut v: Vec<_> = [7i64, 12, 16].iter().map(|&n| (format!("Z/{n}"), Ring(Some(n)), (0..n).collect())).collect();
    v.push(("Z".into(), Ring(None), (-6..14).collect()));
    v
}

fn sample(rng: &mut ChaCha8Rng, space: &[i64], max: usize) -> Vec<i64> {
    let size = 1 + (rand::Rng::gen_range(rng, 0..max));
    let mut v: Vec<i64> = space.choose_multiple(rng, size).copied().collect();
    v.sort();
    v
}

fn ints(s: &GSet) -> Vec<i64> {
    s.iter().map(|x| x.coords()[0]).collect()
}

#[test]
fn moments_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (g, r, space) in spaces() {
        for _ in 0..12 {
            let a = sample(&mut rng, &space, 6);
            let b = sample(&mut rng, &space, 5);
            let (sa, sb) = (set(&g, &a), set(&g, &b));
            for k in 1..=3u32 {
                assert_eq!(energy_k(&sa, k).unwrap() as u64, oracle::energy(r, &a, k as usize), "E_{k} {g} {a:?}");
                assert_eq!(energy_k_pair(&sa, &sb, k).unwrap() as u64, oracle::energy_pair(r, &a, &b, k as usize));
                assert_eq!(sigma_k(&sa, k).unwrap() as u64, oracle::sigma_k(r, &a, k as usize), "sigma_{k} {g} {a:?}");
            }
            for k in 1..=2u32 {
                assert_eq!(t_k(&sa, k).unwrap() as u64, oracle::t_k(r, &a, k as usize), "T_{k} {g} {a:?}");
            }
        }
    }
}

#[test]
fn sumsets_and_delta_sumsets_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let lim = Limits::default();
    for (g, r, space) in spaces() {
        for _ in 0..12 {
            let a = sample(&mut rng, &space, 6);
            let b = sample(&mut rng, &space, 5);
            let c = sample(&mut rng, &space, 4);
            let (sa, sb, sc) = (set(&g, &a), set(&g, &b), set(&g, &c));
            assert_eq!(ints(&sumset(&sa, &sb).unwrap()), oracle::sumset(r, &a, &b, 1));
            assert_eq!(ints(&diffset(&sa, &sb).unwrap()), oracle::sumset(r, &a, &b, -1));
            for (sign, s) in [(Sign::Minus, -1), (Sign::Plus, 1)] {
                let one = delta_sumset_size(&[&sa], &sc, sign, &lim).unwrap() as usize;
                assert_eq!(one, oracle::delta_size(r, &[a.clone()], &c, s));
                let two = delta_sumset_size(&[&sa, &sb], &sc, sign, &lim).unwrap() as usize;
                assert_eq!(two, oracle::delta_size(r, &[a.clone(), b.clone()], &c, s), "{g} {a:?} {b:?} {c:?}");
            }
        }
    }
}

#[test]
fn magnification_matches_subset_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let lim = Limits::default();
    for (g, r, space) in spaces() {
        for _ in 0..10 {
            let a = sample(&mut rng, &space, 7);
            let b = sample(&mut rng, &space, 5);
            let m = magnification(&set(&g, &a), &set(&g, &b), &lim).unwrap();
            let got = (*m.ratio.numer(), *m.ratio.denom());
            assert_eq!(got, oracle::magnification(r, &a, &b), "{g} {a:?} {b:?}");
            let w = ints(&m.witness);
            assert_eq!(oracle::sumset(r, &b, &w, 1).len() as u64 * got.1, got.0 * w.len() as u64);
        }
    }
}

#[test]
fn gram_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    let lim = Limits::default();
    for (g, r, space) in spaces() {
        for _ in 0..6 {
            let a = sample(&mut rng, &space, 5);
            let b = sample(&mut rng, &space, 5);
            for k in 1..=2u32 {
                let gram = build_gram(&set(&g, &a), &set(&g, &b), k, &lim).unwrap();
                let want: Vec<f64> = oracle::gram(r, &a, &b, k).concat().iter().map(|&x| x as f64).collect();
                assert_eq!(gram.to_f64(), want, "{g} {a:?} {b:?} k={k}");
            }
        }
    }
}

/// The bitset walk, the counting route and explicit enumeration agree on coverage and
/// on the first missing tuple.
#[test]
fn basis_depth_routes_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(15);
    let lim = Limits::default();
    for n in [5i64, 6, 7, 8, 9, 11, 13] {
        let space: Vec<i64> = (0..n).collect();
        let mut cases: Vec<Vec<i64>> = (0..6).map(|_| sample(&mut rng, &space, n as usize)).collect();
        cases.push(space.clone());
        for b in cases {
            let sb = set(&format!("Z/{n}"), &b);
            for k in 1..=2usize {
                for (sign, s) in [(Sign::Minus, -1), (Sign::Plus, 1)] {
                    let rep = basis_depth_test(&sb, k, sign, &lim).unwrap();
                    let missing = oracle::basis_missing(n, &b, k, s);
                    let total = (n as u128).pow(k as u32);
                    assert_eq!(rep.total, total);
                    assert_eq!(rep.covered, total - missing.len() as u128, "Z/{n} {b:?} k={k} {sign}");
                    let sets = vec![&sb; k];
                    assert_eq!(rep.covered, delta_sumset_size(&sets, &sb, sign, &lim).unwrap());
                    assert_eq!(rep.is_basis, missing.is_empty());
                    let w = rep.witness.map(|t| t.iter().map(|x| x.coords()[0]).collect::<Vec<_>>());
                    assert_eq!(w.as_ref(), missing.first());
                }
            }
        }
    }
}

/// Groups past the bitset size limit take the tuple-materializing route.
#[test]
fn basis_depth_large_group_route() {
    let n = 8209i64;
    let lim = Limits::default();
    for b in [vec![0, 1, 5, 40, 300, 2000, 4100, 8000], (0..n).step_by(3).collect::<Vec<_>>()] {
        let sb = set("Z/8209", &b);
        let rep = basis_depth_test(&sb, 1, Sign::Minus, &lim).unwrap();
        let diffs = oracle::sumset(Ring(Some(n)), &b, &b, -1);
        assert_eq!(rep.covered, diffs.len() as u128);
        let first = (0..n).find(|x| diffs.binary_search(x).is_err());
        assert_eq!(rep.witness.map(|t| t[0].coords()[0]), first);
    }
}

#[test]
fn small_examples_match_brute_force() {
    let z = Ring(None);
    let a = [0, 1, 3];
    let sa = set("Z", &a);
    assert_eq!(level_sequence(&sa).unwrap(), vec![3, 1, 1, 1, 1, 1, 1]);
    let d = oracle::sumset(z, &a, &a, -1);
    assert_eq!(sigma_k(&set("Z", &d), 2).unwrap() as u64, oracle::sigma_k(z, &d, 2));
    assert_eq!(oracle::sigma_k(z, &d, 2), 7);
    assert_eq!(energy_k(&sa, 4).unwrap() as u64, oracle::energy(z, &a, 4));
    assert_eq!(oracle::energy(z, &a, 4), 87);
    let ab = [0, 1];
    assert_eq!(energy_k_pair(&set("Z", &ab), &set("Z", &ab), 3).unwrap() as u64, oracle::energy_pair(z, &ab, &ab, 3));
    assert_eq!(oracle::energy_pair(z, &ab, &ab, 3), 10);

    let z4 = Ring(Some(4));
    for k in 1..=3u32 {
        let want = oracle::t_k(z4, &[0, 2], k as usize);
        assert_eq!(want, 1 << (2 * k - 1));
        assert_eq!(t_k(&set("Z/4", &[0, 2]), k).unwrap() as u64, want);
    }
    assert_eq!(t_k(&set("Z/8", &[1, 2]), 2).unwrap() as u64, oracle::t_k(Ring(Some(8)), &[1, 2], 2));
    assert_eq!(oracle::t_k(Ring(Some(8)), &[1, 2], 2), 6);

    let m = [1, 2, 4];
    assert_eq!(mult_energy_k(&set("Z", &m), 2).unwrap() as u64, oracle::mult_energy(&m));
    assert_eq!(oracle::mult_energy(&m), 19);
    let prods: std::collections::BTreeSet<i64> = m.iter().flat_map(|x| m.iter().map(move |y| x * y)).collect();
    assert_eq!(product_set_size(&set("Z", &m)).unwrap(), prods.len());
    assert_eq!(prods.len(), 5);
}

#[test]
fn dissociativity_matches_sign_vectors() {
    let lim = Limits::default();
    let r = Ring(Some(8));
    for xs in [vec![1, 2], vec![1, 2, 3], vec![1, 3, 5], vec![2, 4], vec![1, 2, 4]] {
        let s = set("Z/8", &xs);
        assert_eq!(dissociated_test(&s).unwrap(), oracle::dissociated(r, &xs), "{xs:?}");
        assert_eq!(dim_exact(&s, &lim).unwrap().dim, oracle::dim(r, &xs), "{xs:?}");
    }
    assert!(oracle::dissociated(r, &[1, 2]));
    assert_eq!(oracle::dim(r, &[1, 2, 3]), 2);
}

#[test]
fn extraction_primitives_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    for n in [5i64, 7, 10, 12] {
        let g = format!("Z/{n}");
        let space: Vec<i64> = (0..n).collect();
        for _ in 0..6 {
            let a = sample(&mut rng, &space, 5);
            let b = sample(&mut rng, &space, 5);
            let (sa, sb) = (set(&g, &a), set(&g, &b));
            for t in 0..n {
                let te = sa.group().elem(&[t]).unwrap();
                assert_eq!(almost_period_check(&sa, &sb, &te).unwrap() as u64, oracle::almost_period(n, &a, &b, t));
            }
            assert_eq!(nb_cover(&sa, 64).unwrap(), oracle::cover(n, &a, 64), "{g} {a:?}");
            for (sign, s) in [(Sign::Minus, -1), (Sign::Plus, 1)] {
                let got = find_configuration(&sa, &[0, 1, 2], sign).unwrap();
                let got = got.map(|(x, d)| (x.coords()[0], d.coords()[0]));
                assert_eq!(got, oracle::configuration(n, &a, &[0, 1, 2], s), "{g} {a:?} {sign}");
            }
        }
    }
    assert_eq!(oracle::almost_period(7, &[0, 1, 3], &[0, 1, 3], 1), 8);
    assert_eq!(oracle::cover(5, &[0, 1], 64), Some(4));
}
