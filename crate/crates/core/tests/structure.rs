mod common;

use common::*;
use fcrs::confluence::{check_local_confluence, Verdict};
use fcrs::constructions::{check_completeness, ConstructionOutput, VerifyOptions};
use fcrs::order::Certificate;
use fcrs::semigroup::catalog::*;
use fcrs::semigroup::{cayley_fcrs, coordinatize, FiniteSemigroup};

#[test]
fn principal_factors_of_regular_semigroups_coordinatize() {
    let mut factors = 0;
    for (name, s) in named_corpus() {
        if !s.is_regular() {
            continue;
        }
        let green = s.green_classes();
        for class in 0..green.j_classes().len() {
            let pf = s.principal_factor(class).unwrap();
            let f = &pf.semigroup;
            let c = coordinatize(f).unwrap_or_else(|e| panic!("{name} class {class}: {e}"));
            assert_eq!(c.matrix[0][0], Some(c.identity), "{name}");
            let nonzero = f.len() - usize::from(c.zero.is_some());
            assert_eq!(nonzero, c.i_size * c.group.len() * c.lambda_size, "{name}");
            for x in 0..f.len() {
                for y in 0..f.len() {
                    let expected = c.multiply(c.triple_of[x], c.triple_of[y]);
                    assert_eq!(c.triple_of[f.mul(x, y)], expected, "{name}: {} * {}", f.name(x), f.name(y));
                }
            }
            factors += 1;
        }
    }
    assert!(factors > 30);
}

#[test]
fn non_regular_factor_is_rejected() {
    // The J-class {a} of zae has a² = 0, so its principal factor is null.
    let s = zae();
    let a = s.index_of("a").unwrap();
    let class = s.green_classes().j[a];
    let pf = s.principal_factor(class).unwrap();
    assert!(coordinatize(&pf.semigroup).is_err());
}

#[test]
fn cayley_systems_of_small_groups_are_complete() {
    for (name, g) in small_groups() {
        let (sys, _) = cayley_fcrs(&g).unwrap();
        let check = check_completeness(&sys, &Certificate::Length, &VerifyOptions::default()).unwrap();
        assert_eq!(check.verdict, Verdict::CompleteCertifiedAtScale, "{name}");
        assert_eq!(sys.enumerate_irreducibles(2).len(), g.len(), "{name}");
        assert!(check_local_confluence(&sys, 1000).all_resolved());
    }
}

#[test]
fn irreducibles_match_elements_one_to_one() {
    for (name, s) in named_corpus() {
        let out = ConstructionOutput::from_table(&s).unwrap();
        let irr = out.system.enumerate_irreducibles(3);
        assert_eq!(irr.len(), s.len(), "{name}");
        let mut seen: Vec<&str> = irr.iter().map(|w| out.element_of(w).unwrap().unwrap()).collect();
        seen.sort();
        seen.dedup();
        assert_eq!(seen.len(), s.len(), "{name}");
    }
}

#[test]
fn green_classes_of_enumerated_semigroups_match_ideal_oracle() {
    let all: Vec<FiniteSemigroup> = (1..=3).flat_map(all_semigroups).collect();
    assert_eq!(all.len(), 1 + 8 + 113);
    for s in &all {
        let g = s.green_classes();
        let o = IdealOracle::new(s);
        assert_eq!(as_partition(g.d_classes()), o.d());
        assert_eq!(as_partition(g.j_classes()), o.j());
    }
}

#[test]
fn transformation_monoid_has_three_j_classes() {
    let t3 = full_transformations(3);
    let g = t3.green_classes();
    assert_eq!(g.j_classes().len(), 3);
    assert!(t3.is_regular());
    assert_eq!(g.maximal_j_classes().len(), 1);
}
