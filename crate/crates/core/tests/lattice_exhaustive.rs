//! Closed forms against brute force on every sub-algebra of up to five atoms.

use num_traits::{Signed, Zero};
use pure_measure_core::lattice::{all_algebras, seeded_family};
use pure_measure_core::{AlgebraSet, FAMeasure, Rational, SimpleFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const MEASURES: usize = 200;

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    Rational::new(rng.random_range(-6i64..=6), rng.random_range(1i64..=4))
}

/// The fixed family: 200 measures spread over all algebras of `n ≤ 5` atoms.
fn family() -> Vec<FAMeasure> {
    seeded_family(MEASURES, 5, 0x5eed)
}

fn all_sets(n: usize) -> impl Iterator<Item = AlgebraSet> {
    (0..1u32 << n).map(move |b| AlgebraSet::from_bits(n, b))
}

#[test]
fn bell_numbers_count_the_algebras() {
    let counts: Vec<usize> = (1..=5).map(|n| all_algebras(n).len()).collect();
    assert_eq!(counts, [1, 2, 5, 15, 52]);
}

#[test]
fn total_variation_matches_partition_oracle() {
    for mu in family() {
        for s in mu.algebra().sets() {
            assert_eq!(
                mu.total_variation(s).unwrap(),
                mu.tv_partition_oracle(s).unwrap()
            );
        }
    }
}

#[test]
fn jordan_identities() {
    for mu in family() {
        let (pos, neg) = mu.jordan_decompose();
        assert_eq!(pos.sub(&neg).unwrap(), mu);
        assert!(pos.is_nonnegative() && neg.is_nonnegative());
        let full = mu.algebra().full();
        assert!(pos.lattice_meet(&neg, full).unwrap().is_zero());
        for s in mu.algebra().sets() {
            let tv = mu.total_variation(s).unwrap();
            assert_eq!(pos.evaluate(s).unwrap() + neg.evaluate(s).unwrap(), tv);
            // μ⁺(s) = sup over measurable subsets
            let sup = mu
                .algebra()
                .subsets_of(s)
                .unwrap()
                .map(|t| mu.evaluate(t).unwrap())
                .max()
                .unwrap();
            assert_eq!(pos.evaluate(s).unwrap(), sup);
        }
    }
}

#[test]
fn meet_closed_form_matches_exhaustive_infimum() {
    let fam = family();
    for pair in fam.windows(2) {
        let (mu, nu) = (&pair[0], &pair[1]);
        if mu.algebra() != nu.algebra() {
            continue;
        }
        let m = mu.meet(nu).unwrap();
        for s in mu.algebra().sets() {
            assert_eq!(m.evaluate(s).unwrap(), mu.lattice_meet(nu, s).unwrap());
        }
    }
}

#[test]
fn band_decomposition_is_unique_and_orthogonal() {
    for mu in family() {
        let alg = mu.algebra().clone();
        let full = alg.full();
        for band in alg.sets() {
            let (inside, outside) = mu.band_decompose(band).unwrap();
            assert_eq!(inside.add(&outside).unwrap(), mu);
            assert!(inside
                .abs()
                .lattice_meet(&outside.abs(), full)
                .unwrap()
                .is_zero());
            // re-decomposing each part returns it unchanged
            assert_eq!(
                inside.band_decompose(band).unwrap(),
                (inside.clone(), FAMeasure::zero(alg.clone()))
            );
            assert_eq!(
                outside.band_decompose(band).unwrap(),
                (FAMeasure::zero(alg.clone()), outside.clone())
            );
            // a measure dominated by |outside| and carried by the band vanishes
            let halves = [
                Rational::new(1, 2),
                Rational::from_integer(1),
                Rational::new(-1, 2),
            ];
            for c in halves {
                for support in alg.subsets_of(band).unwrap() {
                    let sigma = outside
                        .scale(c)
                        .add(&inside.scale(c))
                        .unwrap()
                        .restrict(support)
                        .unwrap();
                    let dominated = sigma.abs().le(&outside.abs()).unwrap();
                    if dominated {
                        assert!(sigma.is_zero());
                    }
                }
            }
        }
    }
}

#[test]
fn nested_bands_commute() {
    for mu in family() {
        let alg = mu.algebra().clone();
        for outer in alg.sets() {
            for inner in alg.subsets_of(outer).unwrap() {
                let (s1, _) = mu.band_decompose(outer).unwrap();
                let (s12, s1_rest) = s1.band_decompose(inner).unwrap();
                let (s2, _) = mu.band_decompose(inner).unwrap();
                assert_eq!(s12, s2);
                assert_eq!(s1_rest, mu.restrict(outer.difference(inner)).unwrap());
            }
        }
    }
}

#[test]
fn yosida_hewitt_pure_part_vanishes() {
    for mu in family() {
        let (sigma_additive, pure) = mu.yosida_hewitt();
        assert_eq!(sigma_additive, mu);
        assert!(pure.is_zero());
    }
}

#[test]
fn total_variation_triangle_and_orthogonal_equality() {
    let fam = family();
    for pair in fam.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.algebra() != b.algebra() {
            continue;
        }
        let sum = a.add(b).unwrap();
        let orth = a.is_orthogonal(b).unwrap();
        for s in a.algebra().sets() {
            let lhs = sum.total_variation(s).unwrap();
            let rhs = a.total_variation(s).unwrap() + b.total_variation(s).unwrap();
            assert!(lhs <= rhs);
            if orth {
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn outer_measure_properties() {
    for mu in family() {
        let var = mu.abs();
        let n = mu.algebra().universe_len();
        for s in mu.algebra().sets() {
            assert_eq!(var.outer_measure(s).unwrap(), var.evaluate(s).unwrap());
        }
        for a in all_sets(n) {
            // brute-force minimum over covers
            let brute = var
                .algebra()
                .sets()
                .filter(|c| a.is_subset(*c))
                .map(|c| var.evaluate(c).unwrap())
                .min()
                .unwrap();
            let oa = var.outer_measure(a).unwrap();
            assert_eq!(oa, brute);
            for b in all_sets(n) {
                let ob = var.outer_measure(b).unwrap();
                let ou = var.outer_measure(a.union(b)).unwrap();
                assert!(ou <= oa + ob);
                if a.is_subset(b) {
                    assert!(oa <= ob);
                }
            }
        }
        if mu.block_values().iter().any(Signed::is_negative) {
            assert!(mu.outer_measure(AlgebraSet::empty(n)).is_err());
        }
    }
}

#[test]
fn continuity_modes_agree() {
    let fam = family();
    for pair in fam.windows(2) {
        let (mu, nu) = (&pair[0], &pair[1]);
        if mu.algebra() != nu.algebra() {
            continue;
        }
        // the check itself asserts that both routes agree
        let wac = mu
            .continuity_check(nu, pure_measure_core::Continuity::Wac)
            .unwrap();
        let ac = mu
            .continuity_check(nu, pure_measure_core::Continuity::Ac)
            .unwrap();
        assert_eq!(wac, ac);
    }
}

#[test]
fn simple_integral_is_bilinear() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let fam = family();
    for pair in fam.windows(2) {
        let (mu, nu) = (&pair[0], &pair[1]);
        let alg = mu.algebra().clone();
        let k = alg.block_count();
        let f = SimpleFunction::new(
            alg.clone(),
            (0..k).map(|_| random_rational(&mut rng)).collect(),
        )
        .unwrap();
        let g = SimpleFunction::new(
            alg.clone(),
            (0..k).map(|_| random_rational(&mut rng)).collect(),
        )
        .unwrap();
        let (alpha, beta) = (random_rational(&mut rng), random_rational(&mut rng));
        let combo = f.linear_combination(alpha, &g, beta).unwrap();
        assert_eq!(
            combo.integrate(mu).unwrap(),
            alpha * f.integrate(mu).unwrap() + beta * g.integrate(mu).unwrap()
        );
        if nu.algebra() == &alg {
            let both = mu.add(nu).unwrap();
            assert_eq!(
                f.integrate(&both).unwrap(),
                f.integrate(mu).unwrap() + f.integrate(nu).unwrap()
            );
        }
    }
}
