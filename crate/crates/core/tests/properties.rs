use proptest::prelude::*;

use sierpinski_core::esop::{self, ReshapeAlt};
use sierpinski_core::gasket::{build_spectrum, spectrum_value, term_contribution};
use sierpinski_core::gf4::{self, g, ExpansionKind4, GfsopConfig};
use sierpinski_core::minimize::{minimize_observed, CostMetric, Rule};
use sierpinski_core::{
    parse_pla, Coordinate, Digit, Esop, ExpansionKind, Gf4, MinimizeConfig, QuaternaryFunction,
    Reference, TruthTable,
};

// ---- oracles --------------------------------------------------------------

fn point(n: usize, idx: usize) -> Vec<bool> {
    (0..n).map(|i| (idx >> (n - 1 - i)) & 1 == 1).collect()
}

fn term_at(t: &[u8], x: &[bool]) -> bool {
    t.iter().zip(x).all(|(&d, &b)| match d {
        1 => true,
        2 => !b,
        _ => b,
    })
}

fn esop_table(n: usize, terms: &[Vec<u8>]) -> Vec<bool> {
    (0..1 << n)
        .map(|idx| {
            let x = point(n, idx);
            terms.iter().filter(|t| term_at(t, &x)).count() % 2 == 1
        })
        .collect()
}

fn codes(e: &Esop) -> Vec<Vec<u8>> {
    e.terms().iter().map(|t| t.codes()).collect()
}

/// XOR of `f` over the subcube selected by `cell`.
fn subcube_xor(n: usize, f: impl Fn(&[bool]) -> bool, cell: &[u8]) -> bool {
    (0..1 << n)
        .map(|idx| point(n, idx))
        .filter(|x| term_at(cell, x))
        .fold(false, |acc, x| acc ^ f(&x))
}

// ---- strategies -----------------------------------------------------------

fn arb_tt(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = TruthTable> {
    n.prop_flat_map(|n| prop::collection::vec(any::<bool>(), 1 << n))
        .prop_map(|bits| TruthTable::from_bits(&bits).unwrap())
}

fn arb_term(n: usize) -> impl Strategy<Value = Vec<u8>> {
    prop::collection::vec(1u8..=3, n)
}

fn arb_esop(
    n: std::ops::RangeInclusive<usize>,
    terms: std::ops::Range<usize>,
) -> impl Strategy<Value = (usize, Vec<Vec<u8>>)> {
    n.prop_flat_map(move |n| (Just(n), prop::collection::vec(arb_term(n), terms.clone())))
}

fn to_esop(n: usize, terms: &[Vec<u8>]) -> Esop {
    Esop::new(
        n,
        terms
            .iter()
            .map(|t| Coordinate::from_codes(t).unwrap())
            .collect(),
    )
    .unwrap()
}

fn arb_q4(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = QuaternaryFunction> {
    n.prop_flat_map(|n| {
        prop::collection::vec(0u8..4, 1 << (2 * n))
            .prop_map(move |v| QuaternaryFunction::new(n, v.into_iter().map(g).collect()).unwrap())
    })
}

// ---- boolfn ---------------------------------------------------------------

proptest! {
    #[test]
    fn shannon_and_davio_reconstruct(tt in arb_tt(1..=7)) {
        let n = tt.n();
        for var in 0..n {
            let f0 = tt.cofactor(var, false).unwrap();
            let f1 = tt.cofactor(var, true).unwrap();
            for idx in 0..1usize << n {
                let x = point(n, idx);
                let rest: usize = x.iter().enumerate().filter(|&(i, _)| i != var)
                    .fold(0, |acc, (_, &b)| (acc << 1) | usize::from(b));
                let s = if x[var] { f1.get(rest) } else { f0.get(rest) };
                prop_assert_eq!(s, tt.get(idx));
            }
            for kind in [ExpansionKind::Shannon, ExpansionKind::PositiveDavio, ExpansionKind::NegativeDavio] {
                let parts = kind.expand(&tt, var).unwrap();
                prop_assert_eq!(&ExpansionKind::reconstruct(&parts, var).unwrap(), &tt);
            }
        }
    }

    #[test]
    fn pla_parse_emit_fixed_point(
        n_in in 1usize..6,
        n_out in 1usize..4,
        rows in prop::collection::vec((prop::collection::vec(0u8..3, 6), prop::collection::vec(0u8..4, 4)), 0..12),
    ) {
        let mut text = format!(".i {n_in}\n.o {n_out}\n");
        for (inp, out) in &rows {
            let i: String = inp[..n_in].iter().map(|&c| ['0', '1', '-'][c as usize]).collect();
            let o: String = out[..n_out].iter().map(|&c| ['0', '1', '-', '~'][c as usize]).collect();
            text.push_str(&format!("{i} {o}\n"));
        }
        text.push_str(".e\n");
        let spec = parse_pla(&text).unwrap();
        let again = parse_pla(&spec.to_pla()).unwrap();
        prop_assert_eq!(&again, &spec);
        prop_assert_eq!(again.to_pla(), spec.to_pla());
    }

    #[test]
    fn truth_table_ignores_cube_order(
        n in 1usize..7,
        rows in prop::collection::vec(prop::collection::vec(0u8..3, 7), 0..10),
        seed in any::<u64>(),
    ) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let lines: Vec<String> = rows.iter()
            .map(|r| r[..n].iter().map(|&c| ['0', '1', '-'][c as usize]).collect::<String>() + " 1")
            .collect();
        let mut shuffled = lines.clone();
        shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let make = |ls: &[String]| parse_pla(&format!(".i {n}\n.o 1\n{}\n.e\n", ls.join("\n"))).unwrap();
        let a = make(&lines).to_truth_table(0).unwrap();
        let b = make(&shuffled).to_truth_table(0).unwrap();
        prop_assert_eq!(a, b);
    }
}

// ---- gasket ---------------------------------------------------------------

proptest! {
    #[test]
    fn spectrum_cells_are_subcube_xors(tt in arb_tt(1..=5)) {
        let n = tt.n();
        let gk = build_spectrum(&tt).unwrap();
        for idx in 0..3usize.pow(n as u32) {
            let c = Coordinate::from_base3_index(n, idx);
            let want = subcube_xor(n, |x| tt.get(x.iter().fold(0, |a, &b| (a << 1) | usize::from(b))), &c.codes());
            prop_assert_eq!(gk.value(&c), want);
            prop_assert_eq!(spectrum_value(&tt, &c).unwrap(), want);
        }
    }

    #[test]
    fn triangle_rule(tt in arb_tt(1..=8)) {
        let n = tt.n();
        let gk = build_spectrum(&tt).unwrap();
        for idx in 0..3usize.pow(n as u32) {
            let c = Coordinate::from_base3_index(n, idx);
            for var in 0..n {
                if c.digit(var) != Digit::Absent {
                    continue;
                }
                let v = |d| gk.value(&c.with_digit(var, d));
                prop_assert!(!(v(Digit::Absent) ^ v(Digit::Neg) ^ v(Digit::Pos)));
            }
        }
    }

    #[test]
    fn spectrum_is_linear(bits in (1usize..=7).prop_flat_map(|n| (prop::collection::vec(any::<bool>(), 1 << n), prop::collection::vec(any::<bool>(), 1 << n)))) {
        let f = TruthTable::from_bits(&bits.0).unwrap();
        let h = TruthTable::from_bits(&bits.1).unwrap();
        let sf = build_spectrum(&f).unwrap();
        let sh = build_spectrum(&h).unwrap();
        let sx = build_spectrum(&f.xor(&h).unwrap()).unwrap();
        for idx in 0..sf.cell_count() {
            prop_assert_eq!(sx.value_at(idx), sf.value_at(idx) ^ sh.value_at(idx));
        }
    }

    #[test]
    fn term_contribution_is_subcube_xor((t, c) in (1usize..=5).prop_flat_map(|n| (arb_term(n), arb_term(n)))) {
        let n = t.len();
        let want = subcube_xor(n, |x| term_at(&t, x), &c);
        let got = term_contribution(&Coordinate::from_codes(&t).unwrap(), &Coordinate::from_codes(&c).unwrap());
        prop_assert_eq!(got, want);
    }

    #[test]
    fn validity_on_points_equals_validity_on_cells(
        tt in arb_tt(1..=4),
        raw in prop::collection::vec(prop::collection::vec(1u8..=3, 4), 0..6),
    ) {
        let n = tt.n();
        let terms: Vec<Coordinate> = raw.iter().map(|t| Coordinate::from_codes(&t[..n]).unwrap()).collect();
        let gk = build_spectrum(&tt).unwrap();
        let cell_ok = |c: &Coordinate| terms.iter().fold(false, |a, t| a ^ term_contribution(t, c)) == gk.value(c);
        let all: Vec<Coordinate> = (0..gk.cell_count()).map(|i| Coordinate::from_base3_index(n, i)).collect();
        let on_cells = all.iter().all(cell_ok);
        let on_points = all.iter().filter(|c| c.is_point()).all(cell_ok);
        let codes: Vec<Vec<u8>> = terms.iter().map(|t| t.codes()).collect();
        let by_eval = esop_table(n, &codes) == tt.bits().collect::<Vec<_>>();
        prop_assert_eq!(on_cells, on_points);
        prop_assert_eq!(on_cells, by_eval);
    }
}

// ---- esop rewrites --------------------------------------------------------

proptest! {
    #[test]
    fn rewrites_preserve_function((n, terms) in arb_esop(2..=6, 2..8), pick in any::<(usize, usize, usize, bool)>()) {
        let e = to_esop(n, &terms);
        let before = esop_table(n, &terms);
        let t1 = e.terms()[pick.0 % e.len()].clone();
        let t2 = e.terms()[pick.1 % e.len()].clone();
        let var = pick.2 % n;

        let split = e.split_term(&t1, var).unwrap();
        prop_assert_eq!(esop_table(n, &codes(&split)), before.clone());
        prop_assert!(split.cost().term_count <= e.cost().term_count + 1);

        let cancelled = e.cancel_duplicates();
        prop_assert_eq!(esop_table(n, &codes(&cancelled)), before.clone());
        prop_assert!(cancelled.len() <= e.len());

        if t1 != t2 {
            match t1.distance(&t2) {
                1 => {
                    let m = e.merge_distance1(&t1, &t2).unwrap();
                    prop_assert_eq!(esop_table(n, &codes(&m)), before.clone());
                    prop_assert_eq!(m.len() + 1, e.len());
                }
                2 => {
                    let alt = if pick.3 { ReshapeAlt::A } else { ReshapeAlt::B };
                    let r = e.reshape_distance2(&t1, &t2, alt).unwrap();
                    prop_assert_eq!(esop_table(n, &codes(&r)), before.clone());
                    prop_assert_eq!(r.len(), e.len());
                }
                d => {
                    prop_assert!(e.merge_distance1(&t1, &t2).is_err(), "distance {}", d);
                }
            }
        }
    }

    #[test]
    fn merge_then_split_is_identity((t, var, other) in (1usize..=6).prop_flat_map(|n| (arb_term(n), 0..n, 0u8..2))) {
        let n = t.len();
        let t1 = Coordinate::from_codes(&t).unwrap();
        let d2 = t1.digit(var).others()[other as usize];
        let t2 = t1.with_digit(var, d2);
        let e = Esop::new(n, vec![t1.clone(), t2.clone()]).unwrap();
        let merged = e.merge_distance1(&t1, &t2).unwrap();
        prop_assert_eq!(merged.len(), 1);
        let back = merged.split_term(&merged.terms()[0], var).unwrap();
        prop_assert_eq!(back.normalized(), e.normalized());
    }

    #[test]
    fn esop_text_round_trip((n, terms) in arb_esop(1..=8, 0..10)) {
        let e = to_esop(n, &terms);
        prop_assert_eq!(Esop::parse(&e.to_text()).unwrap(), e);
    }
}

// ---- minimize -------------------------------------------------------------

fn small_cfg(seed: u64) -> MinimizeConfig {
    MinimizeConfig {
        max_iterations: 60,
        restarts: 2,
        patience: 20,
        rng_seed: seed,
        ..MinimizeConfig::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn minimize_is_anytime_valid(tt in arb_tt(1..=6), seed in 0u64..1000) {
        let n = tt.n();
        let want: Vec<bool> = tt.bits().collect();
        let mut seen = 0usize;
        let mut bad = None;
        let mut check = |rule: Rule, e: &Esop| {
            seen += 1;
            if bad.is_none() && esop_table(n, &codes(e)) != want {
                bad = Some((rule, e.clone()));
            }
        };
        let r = minimize_observed(Reference::Table(&tt), &small_cfg(seed), Some(&mut check)).unwrap();
        prop_assert!(bad.is_none(), "invalid after {:?}", bad);
        prop_assert!(seen > 0);
        prop_assert_eq!(esop_table(n, &codes(&r.esop)), want);
        prop_assert!(r.cost <= r.initial_cost || r.cost.term_count <= r.initial_cost.term_count);

        // best cost never rises along the trace
        let keys: Vec<_> = r.trace.iter()
            .filter(|ev| matches!(ev.rule, Rule::NewBest | Rule::Backtrack))
            .map(|ev| CostMetric::Lexicographic.key(ev.cost))
            .collect();
        prop_assert!(keys.windows(2).all(|w| w[1] <= w[0]));

        // the result agrees with the spectrum on every cell
        let gk = build_spectrum(&tt).unwrap();
        for idx in 0..gk.cell_count() {
            let c = Coordinate::from_base3_index(n, idx);
            let v = r.esop.terms().iter().fold(false, |a, t| a ^ term_contribution(t, &c));
            prop_assert_eq!(v, gk.value(&c));
        }
    }

    #[test]
    fn minimize_is_deterministic(tt in arb_tt(2..=6), seed in 0u64..1000) {
        let a = sierpinski_core::minimize(Reference::Table(&tt), &small_cfg(seed)).unwrap();
        let b = sierpinski_core::minimize(Reference::Table(&tt), &small_cfg(seed)).unwrap();
        prop_assert_eq!(&a.esop, &b.esop);
        prop_assert_eq!(&a.trace, &b.trace);
        prop_assert_eq!(a.iterations, b.iterations);
    }

    #[test]
    fn fixed_polarity_never_beats_minimize(tt in arb_tt(1..=6)) {
        let pol = esop::best_fixed_polarity(&tt).unwrap();
        let fprm = sierpinski_core::gasket::fprm_coefficients(&tt, &pol).unwrap();
        let r = sierpinski_core::minimize(Reference::Table(&tt), &small_cfg(1)).unwrap();
        prop_assert!(r.cost.term_count <= fprm.term_count());
    }
}

// ---- gf4 ------------------------------------------------------------------

proptest! {
    #[test]
    fn gf4_expansions_reconstruct(f in arb_q4(1..=3), var_pick in any::<usize>()) {
        let var = var_pick % f.n();
        for kind in ExpansionKind4::ALL {
            let c = gf4::expand(&f, var, kind).unwrap();
            prop_assert_eq!(&gf4::reconstruct(&c, var, kind).unwrap(), &f);
        }
    }

    #[test]
    fn gf4_spectrum_round_trip(f in arb_q4(1..=3), pol in prop::collection::vec(0u8..4, 3)) {
        let n = f.n();
        let pol: Vec<Gf4> = pol[..n].iter().map(|&s| g(s)).collect();
        let s = gf4::gf4_spectrum(&f, &pol).unwrap();
        prop_assert_eq!(s.len(), 1 << (2 * n));
        let gs = gf4::spectrum_to_gfsop(n, &pol, &s);
        prop_assert!(gf4::gfsop_verify(&gs, &f).unwrap().valid);
    }

    #[test]
    fn gfsop_minimize_steps_stay_valid(f in arb_q4(1..=3)) {
        let mut bad = 0usize;
        let mut check = |gs: &sierpinski_core::Gfsop| {
            if !gf4::gfsop_verify(gs, &f).unwrap().valid {
                bad += 1;
            }
        };
        let r = gf4::minimize_gfsop_observed(&f, &GfsopConfig::default(), Some(&mut check)).unwrap();
        prop_assert_eq!(bad, 0);
        prop_assert!(r.verified.valid);
        prop_assert!(CostMetric::Lexicographic.key(r.cost) <= CostMetric::Lexicographic.key(r.fixed_polarity_cost));
        prop_assert_eq!(sierpinski_core::Gfsop::parse(&r.gfsop.to_text()).unwrap(), r.gfsop.clone());
        prop_assert_eq!(QuaternaryFunction::parse(&f.to_text()).unwrap(), f.clone());
    }
}
