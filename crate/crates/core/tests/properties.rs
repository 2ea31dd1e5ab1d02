use bsscl::bs_words::{
    britton_cyclic_reduce, parse_chain, s_value, Chain, ChainTerm, GroupParams, Letter, Reduced, TightWord,
};
use bsscl::encoding::{enumerate_turns, turn_exists, winding_context};
use bsscl::exact_lp::SimplexOptions;
use bsscl::solver_block::{solve_block, BlockOptions, SclValue};
use bsscl::Rational;
use num_traits::Zero;
use proptest::prelude::*;

fn group() -> impl Strategy<Value = GroupParams> {
    prop_oneof![Just((2, 3)), Just((2, 4)), Just((3, 5)), Just((2, -3)), Just((4, 6)), Just((3, 3))]
        .prop_map(|(m, l)| GroupParams::new(m, l).unwrap())
}

fn letters(max_len: usize) -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec(
        prop_oneof![
            (-4i64..=4).prop_map(Letter::A),
            prop_oneof![Just(1i64), Just(-1), Just(2), Just(-2)].prop_map(Letter::T)
        ],
        1..max_len,
    )
}

fn tight(max_len: usize) -> impl Strategy<Value = (GroupParams, TightWord)> {
    (group(), letters(max_len)).prop_filter_map("elliptic", |(p, w)| match britton_cyclic_reduce(&w, &p) {
        Reduced::Tight(t) => Some((p, t)),
        Reduced::Elliptic(_) => None,
    })
}

fn tight_in(p: GroupParams, max_len: usize) -> impl Strategy<Value = TightWord> {
    letters(max_len).prop_filter_map("elliptic", move |w| match britton_cyclic_reduce(&w, &p) {
        Reduced::Tight(t) => Some(t),
        Reduced::Elliptic(_) => None,
    })
}

/// Tight words with zero t-exponent sum.
fn balanced(max_len: usize) -> impl Strategy<Value = (GroupParams, TightWord)> {
    (group(), letters(max_len)).prop_filter_map("elliptic", |(p, mut w)| {
        let h: i64 = w.iter().map(|l| if let Letter::T(e) = l { *e } else { 0 }).sum();
        if h != 0 {
            w.push(Letter::T(-h));
        }
        match britton_cyclic_reduce(&w, &p) {
            Reduced::Tight(t) => Some((p, t)),
            Reduced::Elliptic(_) => None,
        }
    })
}

/// Large degenerate instances can stall the exact simplex; those count as
/// resource failures and are skipped.
fn bounded() -> BlockOptions {
    BlockOptions {
        max_cuts: 1_500,
        simplex: SimplexOptions { max_pivots: 3_000, ..SimplexOptions::default() },
        ..BlockOptions::default()
    }
}

fn chain_of(words: &[(i64, &TightWord)]) -> Chain {
    Chain::new(
        words
            .iter()
            .map(|(c, w)| ChainTerm { coeff: Rational::from_integer((*c).into()), word: (*w).clone() })
            .collect(),
    )
    .unwrap()
}

proptest! {
    #[test]
    fn britton_reduction_is_idempotent((p, w) in (group(), letters(14))) {
        match britton_cyclic_reduce(&w, &p) {
            Reduced::Tight(t) => {
                prop_assert_eq!(britton_cyclic_reduce(&t.to_letters(), &p), Reduced::Tight(t.clone()));
                prop_assert_eq!(britton_cyclic_reduce(&t.inverse().to_letters(), &p), Reduced::Tight(t.inverse()));
            }
            Reduced::Elliptic(k) => {
                prop_assert_eq!(britton_cyclic_reduce(&[Letter::A(k)], &p), Reduced::Elliptic(k));
            }
        }
    }

    #[test]
    fn rotation_and_inversion_keep_words_tight((_p, w) in tight(12), k in 0usize..12) {
        let r = w.rotated(k % w.len());
        prop_assert_eq!(r.len(), w.len());
        prop_assert_eq!(w.inverse().inverse(), w.clone());
    }

    #[test]
    fn display_round_trips(
        (p, w, v) in group().prop_flat_map(|p| (Just(p), tight_in(p, 12), tight_in(p, 8))),
        c in 1i64..4,
    ) {
        let chain = chain_of(&[(c, &w), (1, &v)]);
        let again = parse_chain(&chain.to_string(), &p).unwrap();
        prop_assert!(again.equivalent(&chain));
    }

    #[test]
    fn pairing_is_an_involution_and_turns_exist((p, w) in tight(10)) {
        let chain = Chain::single(w);
        let Ok(ctx) = winding_context(&chain, &p) else { return Ok(()) };
        prop_assume!(ctx.we_mod <= 64);
        let alpha = enumerate_turns(&chain, &ctx);
        for t in 0..alpha.len() {
            let pt = alpha.pair(t);
            prop_assert_eq!(alpha.pair(pt), t);
            prop_assert_ne!(pt, t);
            let (a, b) = (alpha.turns[t], alpha.turns[pt]);
            prop_assert!(turn_exists(&alpha.arcs, a.from, a.to));
            prop_assert_eq!(b.from, alpha.pred(a.to));
            prop_assert_eq!(b.to, alpha.succ(a.from));
            prop_assert_eq!((a.wclass + b.wclass) % ctx.we_mod, 0);
        }
    }

    #[test]
    fn s_scales_under_conjugation_by_t((p, w) in balanced(10)) {
        // Rotating past the first syllable conjugates by it, which shifts
        // every level by -eps.
        let eps = w.syllables()[0].eps as i32;
        let s = s_value(&w, &p).unwrap();
        prop_assert_eq!(s_value(&w.rotated(1), &p).unwrap(), s * p.ratio().pow(-eps));
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 12, ..ProptestConfig::default() })]

    #[test]
    fn word_plus_inverse_vanishes((p, w) in tight(7)) {
        let chain = chain_of(&[(1, &w), (1, &w.inverse())]);
        let r = solve_block(&chain, &p, &bounded());
        prop_assume!(r.is_ok());
        prop_assert_eq!(r.unwrap().result.value, SclValue::Finite(Rational::zero()));
    }

    #[test]
    fn scl_is_homogeneous((p, w) in balanced(7), k in 2i64..4) {
        let one = solve_block(&Chain::single(w.clone()), &p, &bounded());
        prop_assume!(one.is_ok());
        let many = solve_block(&chain_of(&[(k, &w)]), &p, &bounded());
        prop_assume!(many.is_ok());
        match (one.unwrap().result.value, many.unwrap().result.value) {
            (SclValue::Finite(a), SclValue::Finite(b)) => prop_assert_eq!(a * Rational::from_integer(k.into()), b),
            (a, b) => prop_assert_eq!(a, b),
        }
    }
}
