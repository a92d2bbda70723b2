//! One test per acceptance criterion. Each prints a single PASS/FAIL line;
//! run with `--nocapture` to see them.

use std::time::{Duration, Instant};

use num_traits::Signed;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use univoque::classify::{self, Reference};
use univoque::count;
use univoque::dimension::{self, AlphaPeriod};
use univoque::exactnum::{int, pow, ratio, to_f64};
use univoque::expand::{self, Mode};
use univoque::scan::{self, CellClass, ScanConfig};
use univoque::{
    make_base, rational_from_decimal, Base, Digit, EpSeq, Error, PointInJ, Rational, Word,
};

fn tol() -> Rational {
    ratio(1, 1_000_000_000_000)
}

fn report(n: u32, title: &str, pass: bool, budget: Duration, start: Instant, detail: &str) {
    let elapsed = start.elapsed();
    let ok = pass && elapsed < budget;
    println!(
        "acceptance {n:>2}: {} {title} ({:.2}s of {:.0}s) {detail}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs_f64()
    );
    assert!(pass, "criterion {n} failed: {detail}");
    assert!(
        elapsed < budget,
        "criterion {n} exceeded its time budget: {elapsed:?}"
    );
}

fn base(p: i64, s: i64) -> Base {
    make_base(ratio(p, s)).unwrap()
}

fn random_seq(rng: &mut ChaCha8Rng, top: Digit, max_pre: usize, max_per: usize) -> EpSeq {
    let pre = (0..rng.gen_range(0..=max_pre))
        .map(|_| rng.gen_range(0..=top))
        .collect();
    let per = (0..rng.gen_range(1..=max_per))
        .map(|_| rng.gen_range(0..=top))
        .collect();
    EpSeq::new(pre, per).unwrap()
}

#[test]
fn criterion_01_moran_matches_closed_form() {
    let start = Instant::now();
    let tribonacci = 1.839_286_755_214_161_f64;
    let periods: [(&[Digit], f64); 5] = [
        (&[1, 0], (1.0 + 5f64.sqrt()) / 2.0),
        (&[1], 2.0),
        (&[2], 3.0),
        (&[2, 1], 1.0 + 3f64.sqrt()),
        (&[1, 1, 0], tribonacci),
    ];
    let mut checked = 0;
    let mut worst = 0f64;
    let mut pass = true;
    for (period, r) in periods {
        let ap = AlphaPeriod::new(Word::new(period.to_vec())).unwrap();
        for q in [2i64, 3, 4] {
            let b = make_base(int(q)).unwrap();
            let result = dimension::dim_g(&ap, &b, &tol());
            if r >= q as f64 {
                pass &= matches!(result, Err(Error::BaseOrderViolation { .. }));
                continue;
            }
            let root = result.unwrap();
            let err = (root.s - r.ln() / (q as f64).ln()).abs();
            worst = worst.max(err);
            pass &= err < 1e-9;
            checked += 1;
        }
    }
    pass &= checked == 11;
    let detail = format!("{checked} pairs, max error {worst:.1e}");
    report(
        1,
        "Moran root equals log r / log q",
        pass,
        Duration::from_secs(5),
        start,
        &detail,
    );
}

#[test]
fn criterion_02_dim_i_closed_forms() {
    let start = Instant::now();
    let (n1, r1) = dimension::dim_i(&ratio(19, 10), &tol()).unwrap();
    let (n2, r2) = dimension::dim_i(&ratio(199, 100), &tol()).unwrap();
    let e1 = (r1.s - 2f64.ln() / (2.0 * 1.9f64.ln())).abs();
    let e2 = (r2.s - 6f64.ln() / (3.0 * 1.99f64.ln())).abs();
    let pass = n1 == 2 && n2 == 3 && e1 < 1e-9 && e2 < 1e-9;
    let detail = format!(
        "N = {n1}, {n2}; s = {:.12}, {:.12}; errors {e1:.1e}, {e2:.1e}",
        r1.s, r2.s
    );
    report(
        2,
        "dim_I agrees with log(2^N-2)/(N log q)",
        pass,
        Duration::from_secs(1),
        start,
        &detail,
    );
}

#[test]
fn criterion_03_dim_i_trend() {
    let start = Instant::now();
    let values: Vec<(usize, f64)> = ["1.85", "1.9", "1.99", "1.999"]
        .iter()
        .map(|q| {
            let (n, root) = dimension::dim_i(&rational_from_decimal(q).unwrap(), &tol()).unwrap();
            (n, root.s)
        })
        .collect();
    let increasing = values.windows(2).all(|w| w[0].1 < w[1].1);
    let last = values.last().unwrap().1;
    let detail = values
        .iter()
        .map(|(n, s)| format!("N={n} s={s:.6}"))
        .collect::<Vec<_>>()
        .join(", ");
    report(
        3,
        "dim_I strictly increasing and > 0.9 at 1.999",
        increasing && last > 0.9,
        Duration::from_secs(1),
        start,
        &detail,
    );
}

#[test]
fn criterion_04_unique_test_matches_bruteforce() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let bases = [base(3, 2), base(5, 3), base(9, 5), base(2, 1), base(5, 2)];
    let (mut pairs, mut periodic, mut both, mut disagreements) = (0, 0, 0, 0);
    let mut decisive_unique = 0;
    for b in &bases {
        let alpha = classify::alpha_reference(b, 256).unwrap();
        let mut points = Vec::new();
        for _ in 0..60 {
            let den = rng.gen_range(1..=40);
            let k = rng.gen_range(0..=den);
            points.push(b.j_max() * ratio(k, den));
        }
        for _ in 0..60 {
            let c = random_seq(&mut rng, b.top_digit(), 3, 3);
            points.push(expand::eval_seq(&c, b).unwrap());
        }
        for x in points {
            let p = PointInJ::new(x, b.clone()).unwrap();
            pairs += 1;
            let brute = count::is_unique_bruteforce(&p, 20).unwrap();
            let Some(c) = expand::detect_period(&p, Mode::Greedy, 1024).unwrap() else {
                continue;
            };
            periodic += 1;
            let exact = classify::is_unique_expansion(&c, &alpha).unwrap();
            if exact.is_yes() {
                decisive_unique += 1;
            }
            if exact.is_decisive() && brute.is_decisive() {
                both += 1;
                if exact.is_yes() != brute.is_yes() {
                    disagreements += 1;
                }
            }
        }
    }
    let detail = format!(
        "{pairs} pairs, {periodic} periodic, {both} decisive on both sides ({decisive_unique} unique), {disagreements} disagreements"
    );
    let pass = pairs >= 500 && both > 0 && disagreements == 0;
    report(
        4,
        "unique-expansion test agrees with brute force",
        pass,
        Duration::from_secs(60),
        start,
        &detail,
    );
}

/// `σ^i(w 0^∞) < w 0^∞` for every `i ≥ 1`.
fn is_parry_word(w: &[Digit]) -> bool {
    let s = EpSeq::finite(w.to_vec());
    (1..w.len()).all(|i| s.shift(i).lex_compare(&s).is_lt())
}

#[test]
fn criterion_05_alpha_and_beta_forms_agree() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut triples, mut yes, mut disagreements) = (0, 0, 0);
    while triples < 400 {
        let len = rng.gen_range(1..=6);
        let mut w: Vec<Digit> = (0..len).map(|_| rng.gen_range(0..=3)).collect();
        w[0] = rng.gen_range(1..=3);
        let last = w.len() - 1;
        if w[last] == 0 || w == [1] || !is_parry_word(&w) {
            continue;
        }
        let mut period = w.clone();
        period[last] -= 1;
        let alpha = EpSeq::periodic(period).unwrap();
        let top = alpha.digit(0);
        let beta = Reference::Exact(EpSeq::finite(w));
        let alpha = Reference::Exact(alpha);
        let a = random_seq(&mut rng, top, 4, 4);
        if !classify::is_quasi_greedy_admissible(&a, &alpha)
            .unwrap()
            .is_yes()
        {
            continue;
        }
        let v = classify::in_v(&a, &alpha).unwrap();
        let vb = classify::in_v_beta_form(&a, &beta).unwrap();
        triples += 1;
        yes += usize::from(v.is_yes());
        if v.is_yes() != vb.is_yes() || v.is_decisive() != vb.is_decisive() {
            disagreements += 1;
        }
    }
    let detail = format!("{triples} triples, {yes} in V, {disagreements} disagreements");
    let pass = disagreements == 0 && yes > 0;
    report(
        5,
        "V-condition via alpha equals V-condition via beta",
        pass,
        Duration::from_secs(10),
        start,
        &detail,
    );
}

#[test]
fn criterion_06_nesting_and_density() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut alphas: Vec<Reference> = ["(10)", "(110)", "(1)", "(21)", "(2)", "(210)"]
        .iter()
        .map(|s| Reference::Exact(s.parse().unwrap()))
        .collect();
    for b in [base(9, 5), base(5, 2), base(12, 5), base(7, 3)] {
        alphas.push(classify::alpha_reference(&b, 256).unwrap());
    }
    let (mut unique, mut outside_v) = (0, 0);
    for alpha in &alphas {
        let top = alpha.first_digit().unwrap();
        for _ in 0..400 {
            let c = random_seq(&mut rng, top, 4, 5);
            if classify::is_unique_expansion(&c, alpha).unwrap().is_yes() {
                unique += 1;
                if !classify::in_v(&c, alpha).unwrap().is_yes() {
                    outside_v += 1;
                }
            }
        }
    }

    let member = classify::closure_minus_j_member(&ratio(3, 2), 2, 64).unwrap();
    let expected: EpSeq = "2(1)".parse().unwrap();
    let in_closure = member.classification.is_yes() && member.sequence.as_ref() == Some(&expected);

    let q2 = dimension::q_m_root(2, &tol()).unwrap();
    let r = ratio(401, 200);
    let rb = make_base(r.clone()).unwrap();
    let x = expand::eval_seq(&expected, &rb).unwrap();
    let distance = (&x - ratio(3, 2)).abs().max((&r - int(2)).abs());
    let in_range = r > int(2) && r < q2.lo;
    let p = PointInJ::new(x.clone(), rb.clone()).unwrap();
    let certified = count::is_unique_bruteforce(&p, 20).unwrap().is_yes()
        && classify::is_unique_expansion(&expected, &classify::alpha_reference(&rb, 256).unwrap())
            .unwrap()
            .is_yes();

    let detail = format!(
        "{unique} unique sequences, {outside_v} outside V; (3/2, 2) via {}; r = 401/200 < q_2 ≈ {:.6}, x' ≈ {:.6}, distance {:.4}",
        member.sequence.map(|s| s.to_string()).unwrap_or_else(|| "none".into()),
        q2.approx(),
        to_f64(&x),
        to_f64(&distance)
    );
    let pass = unique >= 100
        && outside_v == 0
        && in_closure
        && in_range
        && distance < ratio(1, 100)
        && certified;
    report(
        6,
        "unique sequences lie in V; closure point approximated",
        pass,
        Duration::from_secs(30),
        start,
        &detail,
    );
}

#[test]
fn criterion_07_greedy_is_lexicographic_maximum() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut cases, mut failures) = (0, 0);
    while cases < 500 {
        let s = rng.gen_range(1..=6);
        let p = rng.gen_range(s + 1..=3 * s);
        let b = base(p, s);
        let den = rng.gen_range(1..=50);
        let x = b.j_max() * ratio(rng.gen_range(0..=den), den);
        let point = PointInJ::new(x, b).unwrap();
        let depth = rng.gen_range(1..=12);
        let e = count::enumerate_prefixes(&point, depth, 1 << 20).unwrap();
        assert!(!e.overflow);
        let greedy = expand::greedy_prefix(&point, depth).unwrap().digits;
        let quasi = expand::quasi_greedy_prefix(&point, depth).unwrap().digits;
        let max = e.prefixes.iter().max().unwrap();
        if &greedy != max || quasi.digits() > greedy.digits() {
            failures += 1;
        }
        cases += 1;
    }
    let detail = format!("{cases} cases, {failures} failures");
    report(
        7,
        "greedy prefix is the largest feasible prefix",
        failures == 0,
        Duration::from_secs(60),
        start,
        &detail,
    );
}

#[test]
fn criterion_08_expansions_converge() {
    let start = Instant::now();
    let target = [1, 0, 1, 0, 0, 0, 0, 0];
    let mut pass = true;
    let mut lines = Vec::new();
    for mode in [Mode::Greedy, Mode::QuasiGreedy] {
        for (sx, sq) in [(1, 1), (1, -1), (-1, 1), (-1, -1)] {
            let mut agreement = Vec::new();
            for k in [100i64, 1_000, 10_000] {
                let b = make_base(ratio(3, 2) + ratio(sq, k)).unwrap();
                let p = PointInJ::new(int(1) + ratio(sx, k), b).unwrap();
                let w = expand::expansion_prefix(&p, mode, 8).unwrap().digits;
                agreement.push(
                    w.digits()
                        .iter()
                        .zip(&target)
                        .take_while(|(a, b)| a == b)
                        .count(),
                );
            }
            pass &= agreement.windows(2).all(|w| w[0] <= w[1]) && agreement[2] == 8;
            lines.push(format!("{agreement:?}"));
        }
    }
    let detail = format!("agreement lengths {}", lines.join(" "));
    report(
        8,
        "nearby expansions stabilise to 10100000",
        pass,
        Duration::from_secs(5),
        start,
        &detail,
    );
}

#[test]
fn criterion_09_block_avoidance_bound() {
    let start = Instant::now();
    let cases: [(i64, i64, &[usize]); 8] = [
        (3, 2, &[1]),
        (3, 2, &[1, 1]),
        (5, 3, &[2]),
        (5, 3, &[1, 2]),
        (9, 5, &[1]),
        (5, 2, &[2]),
        (5, 2, &[1, 1]),
        (7, 3, &[1]),
    ];
    let (mut solved, mut worst) = (0, 0f64);
    let mut pass = true;
    for (p, s, blocks) in cases {
        let b = base(p, s);
        let k = blocks.len();
        let n0 = dimension::minimal_n(b.q(), blocks, 200).unwrap();
        if n0 > *blocks.iter().max().unwrap() {
            let rejected = dimension::thm28_bound(&b, k, n0 - 1, blocks, &tol());
            pass &= matches!(rejected, Err(Error::GrowNRequired(_)));
        }
        for n in [n0, n0 + 1, n0 + 3] {
            let root = dimension::thm28_bound(&b, k, n, blocks, &tol()).unwrap();
            let sys = dimension::c_system(&b, k, n, blocks).unwrap();
            let err = (sys.moran_value(root.s) - 1.0).abs();
            worst = worst.max(err);
            pass &= root.s < 1.0 && err < 1e-9;

            let mut tilde = expand::alpha_prefix(&b, n).unwrap().0;
            *tilde.last_mut().unwrap() += 1;
            let lhs = dimension::c_of_s(&b, k, n, blocks, 1).unwrap()
                + pow(&b.q().recip(), blocks.iter().sum());
            let rhs = pow(&expand::eval_word(&tilde, b.q()), k);
            pass &= lhs == rhs;
            solved += 1;
        }
    }
    let detail = format!("{solved} bounds, max |C(s) - 1| {worst:.1e}");
    report(
        9,
        "block-avoidance bound below one",
        pass,
        Duration::from_secs(5),
        start,
        &detail,
    );
}

#[test]
fn criterion_10_scan_is_reproducible() {
    let start = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let mut images = Vec::new();
    let mut zero_column = true;
    for name in ["a.pgm", "b.pgm"] {
        let mut cfg = ScanConfig::default();
        cfg.set("output", dir.path().join(name).to_str().unwrap())
            .unwrap();
        let result = scan::scan(&cfg).unwrap();
        result.write_file().unwrap();
        zero_column &= result
            .column(0)
            .all(|c| c.class == CellClass::UniqueCertified);
        images.push(std::fs::read(&cfg.output).unwrap());
    }
    let identical = images[0] == images[1];
    let detail = format!(
        "{} bytes, identical = {identical}, x = 0 column unique = {zero_column}",
        images[0].len()
    );
    report(
        10,
        "64x64 scan is byte-identical across runs",
        identical && zero_column,
        Duration::from_secs(120),
        start,
        &detail,
    );
}
