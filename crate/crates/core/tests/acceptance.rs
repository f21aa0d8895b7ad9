//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints exactly one PASS/FAIL line, even when all pass.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use qadvice::amplitude::{decode_bit, decode_via_gateset, encode_theta};
use qadvice::bits::BitString;
use qadvice::fingerprint::{
    acceptance_with_states, advice_field, build_advice, membership_test, FingerprintAdvice,
};
use qadvice::prime_field::PrimeField;
use qadvice::qrac::{binary_entropy, rac21_scheme, rac31_scheme, rac_search, scheme_success};
use qadvice::quantum::{
    decode_circuit, encode_circuit, unitary_of, CMatrix, Circuit, Gate, Qustring,
};
use qadvice::separations::{
    advice_copies_for, counting_inequality, diagonal_sparse_set, majority_amplify,
    AdvisedClassifier, DiagonalOutcome, THRESHOLD,
};
use qadvice::synthesis::{sk_approximate, synthesize_state, synthesize_unitary};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: qadvice::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn trial_division_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn entropy(p: f64) -> f64 {
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn haar_unitary(dim: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(dim, dim, |_, _| gaussian(rng)).qr().q()
}

fn random_state(k: usize, rng: &mut ChaCha8Rng) -> Qustring {
    Qustring::normalized((0..1 << k).map(|_| gaussian(rng)).collect()).unwrap()
}

/// `min_phi ||A - e^{i phi} B||` for 2x2 unitaries from the eigenphases of `A^dag B`.
fn phase_free_distance_2x2(a: &CMatrix, b: &CMatrix) -> f64 {
    let w = a.adjoint() * b;
    let tr = w[(0, 0)] + w[(1, 1)];
    let det = w[(0, 0)] * w[(1, 1)] - w[(0, 1)] * w[(1, 0)];
    let disc = (tr * tr - det * 4.0).sqrt();
    let (l1, l2) = ((tr + disc) / 2.0, (tr - disc) / 2.0);
    let gap = (l1 / l2).arg().abs();
    2.0 * (gap / 4.0).sin()
}

/// `min_phi || |a> - e^{i phi} |b> ||`.
fn phase_free_state_distance(a: &Qustring, b: &Qustring) -> f64 {
    let overlap: Complex64 = a
        .amplitudes()
        .iter()
        .zip(b.amplitudes())
        .map(|(x, y)| x.conj() * y)
        .sum();
    (2.0 - 2.0 * overlap.norm()).max(0.0).sqrt()
}

/// Least-squares slope of `y` on `x`.
fn slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

fn fingerprint_soundness() -> Outcome {
    let (n, f) = (8, 2);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let chain_cap = ratio(4 * 7, 131);
    let mut worst = BigRational::zero();
    let mut checked = 0;
    for set in 0..100 {
        let size = rng.random_range(1..=2 * f);
        let mut chosen = BTreeSet::new();
        while chosen.len() < size {
            chosen.insert(rng.random_range(0..1u64 << n));
        }
        let members: Vec<BitString> = chosen
            .iter()
            .map(|&x| BitString::from_index(x, n))
            .collect();
        let advice = lib(build_advice(&members, n, f))?;
        ensure(advice.field().order() == 131, || {
            format!("set {set}: q = {}", advice.field().order())
        })?;
        let bound = advice.soundness_bound();
        ensure(bound <= chain_cap && chain_cap < ratio(1, 4), || {
            format!("set {set}: bound chain {bound} <= 28/131 < 1/4 broken")
        })?;
        for y in &members {
            let out = lib(membership_test(y, &advice, &mut rng))?;
            ensure(out.acceptance_probability.is_one(), || {
                format!("member {y} has {}", out.acceptance_probability)
            })?;
        }
        for _ in 0..10 {
            let x = loop {
                let x = rng.random_range(0..1u64 << n);
                if !chosen.contains(&x) {
                    break x;
                }
            };
            let x = BitString::from_index(x, n);
            let out = lib(membership_test(&x, &advice, &mut rng))?;
            ensure(out.acceptance_probability <= bound, || {
                format!("non-member {x}: {} > {bound}", out.acceptance_probability)
            })?;
            if out.acceptance_probability > worst {
                worst = out.acceptance_probability.clone();
            }
            checked += 1;
        }
    }
    Ok(format!(
        "100 sets, {checked} non-members, worst {worst} ~ {:.4} <= 28/131 ~ 0.2137",
        worst.to_f64().unwrap()
    ))
}

fn field_sizing() -> Outcome {
    for n in 2..=64usize {
        for f in 1..=4usize {
            let q = lib(advice_field(n, f))?.order();
            let floor = 8 * n as u64 * f as u64;
            ensure(q >= floor, || format!("n={n} f={f}: q={q} < {floor}"))?;
            ensure(trial_division_prime(q), || format!("q={q} not prime"))?;
            ensure((floor + 1..q).all(|c| !trial_division_prime(c)), || {
                format!("n={n} f={f}: a prime below {q} exceeds {floor}")
            })?;
        }
    }
    Ok("252 (n, f) pairs, q prime, least above 8nf".into())
}

fn qrac_constant() -> Outcome {
    let c = 1.0 - lib(binary_entropy(1.0 / 3.0))?;
    let oracle = 1.0 - entropy(1.0 / 3.0);
    ensure((c - 0.081704).abs() <= 1e-6, || format!("1 - H(1/3) = {c}"))?;
    ensure((c - oracle).abs() <= 1e-12, || {
        format!("{c} vs oracle {oracle}")
    })?;
    ensure(c > 0.08, || format!("{c} <= 0.08"))?;
    Ok(format!("1 - H(1/3) = {c:.9}"))
}

fn qrac_schemes() -> Outcome {
    let p21 = lib(scheme_success(&rac21_scheme()))?;
    let p31 = lib(scheme_success(&rac31_scheme()))?;
    let c21 = 0.5 + 1.0 / (2.0 * 2f64.sqrt());
    let c31 = 0.5 + 1.0 / (2.0 * 3f64.sqrt());
    ensure((p21 - c21).abs() <= 1e-9, || {
        format!("rac21 {p21} vs {c21}")
    })?;
    ensure((p31 - c31).abs() <= 1e-9, || {
        format!("rac31 {p31} vs {c31}")
    })?;
    let search = lib(rac_search(2, 1, std::f64::consts::PI / 180.0, 64, 2024))?;
    ensure(search.per_start.len() == 64, || "expected 64 starts".into())?;
    ensure(search.best_p >= 0.8535, || {
        format!("search reached {}", search.best_p)
    })?;
    ensure(search.best_p <= c21 + 1e-3, || {
        format!("search {} beyond optimum", search.best_p)
    })?;
    let rescored = lib(scheme_success(&search.best_scheme))?;
    ensure((rescored - search.best_p).abs() <= 1e-9, || {
        format!("rescored {rescored}")
    })?;
    for (n, m, p) in [(2, 1, p21), (3, 1, p31), (2, 1, search.best_p)] {
        let need = (1.0 - entropy(p)) * n as f64;
        ensure(m as f64 >= need - 1e-9, || {
            format!("({n},{m},{p}) violates m >= {need}")
        })?;
    }
    Ok(format!(
        "rac21 {p21:.12}, rac31 {p31:.12}, search best {:.9}",
        search.best_p
    ))
}

fn amplitude_advice() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut lo, mut hi) = (1.0f64, 0.0f64);
    for case in 0..200 {
        let pattern: Vec<bool> = (0..12).map(|_| rng.random_bool(0.5)).collect();
        let theta = lib(encode_theta(&pattern))?;
        for k in 1..=11 {
            let d = lib(decode_bit(&theta, k))?;
            let p = d.acceptance_probability;
            ensure(d.decision == pattern[k - 1], || {
                format!("case {case} k={k}: wrong decision")
            })?;
            if pattern[k - 1] {
                ensure(p >= 0.987, || format!("case {case} k={k}: member at {p}"))?;
                lo = lo.min(p);
            } else {
                ensure(p <= 0.013, || {
                    format!("case {case} k={k}: non-member at {p}")
                })?;
                hi = hi.max(p);
            }
        }
    }
    let all = lib(decode_bit(&lib(encode_theta(&[true; 12]))?, 1))?.acceptance_probability;
    let closed = (std::f64::consts::TAU / 7.0 + std::f64::consts::FRAC_PI_4)
        .sin()
        .powi(2);
    ensure((all - 0.987464).abs() <= 1e-6, || {
        format!("all members k=1: {all}")
    })?;
    ensure((all - closed).abs() <= 1e-9, || {
        format!("{all} vs closed form {closed}")
    })?;
    Ok(format!(
        "2200 decodes, member min {lo:.6}, non-member max {hi:.6}, all-members {all:.7}"
    ))
}

fn amplitude_gateset() -> Outcome {
    let eps = 1e-2;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let pattern: Vec<bool> = (0..12).map(|_| rng.random_bool(0.5)).collect();
        let k = rng.random_range(1..=11);
        let theta = lib(encode_theta(&pattern))?;
        let exact = lib(decode_bit(&theta, k))?;
        let g = lib(decode_via_gateset(&theta, k, eps))?;
        let shift = (g.probability - exact.acceptance_probability).abs();
        ensure(shift <= 2.0 * eps, || format!("case {case}: shift {shift}"))?;
        ensure(g.decision == exact.decision, || {
            format!("case {case}: decision flipped")
        })?;
        worst = worst.max(shift);
    }
    Ok(format!("50 cases, largest shift {worst:.2e} <= 2e-2"))
}

fn synthesis() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_u: f64 = 0.0;
    for case in 0..100 {
        let u = haar_unitary(2, &mut rng);
        let r = lib(synthesize_unitary(&u, 1e-2))?;
        let err = phase_free_distance_2x2(&unitary_of(&r.circuit), &u);
        ensure(err < 1e-2, || format!("unitary {case}: error {err}"))?;
        worst_u = worst_u.max(err);
    }
    let mut worst_s: f64 = 0.0;
    for case in 0..20 {
        let target = random_state(3, &mut rng);
        let r = lib(synthesize_state(&target, 0.1))?;
        let out = lib(r.circuit.apply(&Qustring::zero(3)))?;
        let err = phase_free_state_distance(&out, &target);
        ensure(err < 0.1, || format!("state {case}: error {err}"))?;
        worst_s = worst_s.max(err);
    }

    // size against 4^k log^3(1/eps), least-squares constant through the origin
    let eps = 0.1f64;
    let mut samples = Vec::new();
    for k in 1..=4 {
        for _ in 0..3 {
            let r = lib(synthesize_state(&random_state(k, &mut rng), eps))?;
            samples.push((
                4f64.powi(k as i32) * (1.0 / eps).log2().powi(3),
                r.size as f64,
            ));
        }
    }
    let c = samples.iter().map(|(b, s)| b * s).sum::<f64>()
        / samples.iter().map(|(b, _)| b * b).sum::<f64>();
    for &(b, s) in &samples {
        ensure(s <= 2.0 * c * b, || {
            format!("size {s} exceeds 2 * {c:.3} * {b:.1}")
        })?;
    }

    // SK word length against log(1/eps), median over a few targets
    let eps_grid: Vec<f64> = (1..=6).map(|j| 10f64.powi(-j)).collect();
    let targets: Vec<CMatrix> = (0..5).map(|_| haar_unitary(2, &mut rng)).collect();
    let mut lens = Vec::new();
    for &e in &eps_grid {
        let mut l: Vec<usize> = Vec::new();
        for u in &targets {
            let circuit = lib(sk_approximate(u, e))?;
            let err = phase_free_distance_2x2(&unitary_of(&circuit), u);
            ensure(err < e, || format!("sk at {e}: error {err}"))?;
            l.push(circuit.size().max(1));
        }
        l.sort_unstable();
        lens.push(l[l.len() / 2] as f64);
    }
    let x: Vec<f64> = eps_grid.iter().map(|e| (1.0 / e).log2().ln()).collect();
    let y: Vec<f64> = lens.iter().map(|l| l.ln()).collect();
    let e_fit = slope(&x, &y);
    ensure(e_fit <= 4.0, || {
        format!("word length exponent {e_fit:.3} > 4 (lengths {lens:?})")
    })?;
    Ok(format!(
        "unitary err max {worst_u:.2e}, state err max {worst_s:.3}, size/4^k constant {c:.3}, SK exponent {e_fit:.2} (median lengths {lens:?})"
    ))
}

fn subsets_up_to(universe: u64, max: u64) -> BigUint {
    let mut total = BigUint::zero();
    let mut term = BigUint::one();
    for j in 0..=max {
        total += &term;
        term = term * BigUint::from(universe - j) / BigUint::from(j + 1);
    }
    total
}

fn counting_and_diagonalization() -> Outcome {
    let mut covered = 0;
    for n in 3..=12usize {
        for f in 1..=4usize.min(1 << (n - 1)) {
            let r = lib(counting_inequality(n, f))?;
            let lhs = subsets_up_to(1 << n, 2 * f as u64);
            ensure(r.lhs == lhs, || {
                format!("n={n} f={f}: lhs {} vs {lhs}", r.lhs)
            })?;
            ensure(r.rhs == BigUint::one() << (f * n), || {
                format!("n={n} f={f}: rhs")
            })?;
            let log_lhs = lhs.bits() as f64 - 1.0;
            if 2 * f < 1 << n && ((f * n) as f64) < log_lhs {
                ensure(r.holds, || format!("n={n} f={f}: inequality fails"))?;
                covered += 1;
            }
        }
    }
    let (n, f) = (4, 1);
    let family = lib(AdvisedClassifier::random_family(8, n, 3, 42))?;
    let d = lib(diagonal_sparse_set(&family, n, f))?;
    let DiagonalOutcome::Found(set) = d.outcome else {
        return Err("no escaping set found".into());
    };
    ensure(set.len() <= 2 * f, || format!("set {set:?} too large"))?;
    for c in &family {
        for s in 0..1u64 << c.advice_len() {
            let errs = (0..1u64 << n).any(|x| {
                let p = c.acceptance(x, s);
                let correct = if set.contains(&x) { p } else { 1.0 - p };
                correct < THRESHOLD
            });
            ensure(errs, || {
                format!("classifier {} with advice {s} decides {set:?}", c.id())
            })?;
        }
    }
    Ok(format!(
        "{covered} (n, f) pairs hold; set {set:?} escapes 8 classifiers x 8 advice strings"
    ))
}

fn amplification() -> Outcome {
    let two_thirds = ratio(2, 3);
    let v = lib(majority_amplify(&two_thirds, 3))?;
    ensure(v == ratio(20, 27), || format!("majority(2/3, 3) = {v}"))?;

    let eps = BigRational::new(BigInt::one(), BigInt::from(1024));
    let t = lib(advice_copies_for(&eps, &two_thirds))?;
    let target = BigRational::one() - &eps;
    let exact = lib(majority_amplify(&two_thirds, t))?;
    ensure(exact >= target, || format!("t={t} misses 1 - 2^-10"))?;
    if t >= 3 {
        let below = lib(majority_amplify(&two_thirds, t - 2))?;
        ensure(below < target, || format!("t={t} is not minimal"))?;
    }
    let p_exact = exact.to_f64().unwrap();
    let trials = 1_000_000u64;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let wins = (0..trials)
        .filter(|_| (0..t).filter(|_| rng.random_bool(2.0 / 3.0)).count() as u64 > t / 2)
        .count();
    let est = wins as f64 / trials as f64;
    let sigma = (p_exact * (1.0 - p_exact) / trials as f64).sqrt();
    ensure((est - p_exact).abs() <= 3.0 * sigma, || {
        format!("simulated {est} vs {p_exact}, sigma {sigma:.2e}")
    })?;

    for p in [ratio(11, 20), ratio(2, 3), ratio(9, 10)] {
        let mut prev = BigRational::zero();
        for t in (1..=201).step_by(2) {
            let v = lib(majority_amplify(&p, t))?;
            ensure(v > prev, || format!("p={p}: not increasing at t={t}"))?;
            let pf = p.to_f64().unwrap();
            let floor = 1.0 - (-2.0 * t as f64 * (pf - 0.5).powi(2)).exp();
            ensure(v.to_f64().unwrap() >= floor - 1e-12, || {
                format!("p={p} t={t}: below Hoeffding")
            })?;
            prev = v;
        }
    }
    Ok(format!(
        "20/27 exact; 2^-10 needs t={t}, exact {p_exact:.7}, simulated {est:.7} (3 sigma {:.1e})",
        3.0 * sigma
    ))
}

fn random_circuit(rng: &mut ChaCha8Rng) -> Circuit {
    let width = rng.random_range(1..=8);
    let len = rng.random_range(0..=60);
    let mut c = Circuit::new(width);
    for _ in 0..len {
        let q = rng.random_range(0..width);
        let gate = match rng.random_range(0..7) {
            0 => Gate::h(q),
            1 => Gate::t(q),
            2 => Gate::tdg(q),
            3 => Gate::s(q),
            4 => Gate::sdg(q),
            5 => Gate::x(q),
            _ if width > 1 => {
                let t = (q + rng.random_range(1..width)) % width;
                Gate::cnot(q, t)
            }
            _ => Gate::h(q),
        };
        c.push(gate).unwrap();
    }
    c
}

fn codec() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for case in 0..1000 {
        let c = random_circuit(&mut rng);
        let code = lib(encode_circuit(&c))?;
        ensure(code.len() >= c.size(), || {
            format!("case {case}: {} bytes for {} gates", code.len(), c.size())
        })?;
        let back = lib(decode_circuit(&code))?;
        ensure(back == c, || format!("case {case}: round trip differs"))?;
    }
    Ok("1000 circuits round-trip, |Code(C)| >= size(C)".into())
}

fn advice_pipeline() -> Outcome {
    let eps = 1.0 / 6.0;
    let members = vec![BitString::from_index(0b10, 2)];
    let advice = lib(FingerprintAdvice::with_field(
        &members,
        2,
        1,
        lib(PrimeField::new(7))?,
    ))?;
    let fp = &advice.fingerprints()[0];
    ensure(fp.register_qubits() == 3, || {
        format!("register width {}", fp.register_qubits())
    })?;
    let ideal = lib(fp.state())?;
    let r = lib(synthesize_state(&ideal, eps))?;
    let prepared = lib(r.circuit.apply(&Qustring::zero(r.k)))?;
    let dist = phase_free_state_distance(&prepared, &ideal);
    ensure(dist <= eps, || {
        format!("prepared fingerprint off by {dist}")
    })?;
    let mut worst: f64 = 0.0;
    for x in 0..4 {
        let x = BitString::from_index(x, 2);
        let member = members.contains(&x);
        let p = lib(acceptance_with_states(
            &x,
            &advice,
            std::slice::from_ref(&prepared),
        ))?;
        worst = worst.max(if member { 1.0 - p } else { p });
    }
    ensure(worst <= 1.0 / 3.0, || format!("worst error {worst}"))?;
    Ok(format!(
        "GF(7), 3+3 qubit fingerprint at distance {dist:.2e} ({} gates), worst error {worst:.4} over all 4 inputs",
        r.size
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 11] = [
        (
            "fingerprint completeness and soundness",
            fingerprint_soundness,
            5,
        ),
        ("field sizing", field_sizing, 1),
        ("qrac constant", qrac_constant, 1),
        ("qrac schemes and search", qrac_schemes, 60),
        ("amplitude advice decoding", amplitude_advice, 5),
        (
            "amplitude decoding through the gate set",
            amplitude_gateset,
            120,
        ),
        ("gate-set synthesis", synthesis, 600),
        (
            "counting and diagonalization",
            counting_and_diagonalization,
            30,
        ),
        ("majority amplification", amplification, 60),
        ("circuit codec", codec, 60),
        ("short advice pipeline", advice_pipeline, 60),
    ];
    let mut failures = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let outcome = outcome.and_then(|detail| {
            if took <= Duration::from_secs(*limit) {
                Ok(detail)
            } else {
                Err(format!("{detail}; took longer than {limit} s"))
            }
        });
        match outcome {
            Ok(detail) => println!(
                "PASS {:2} {name} ({:.2} s): {detail}",
                i + 1,
                took.as_secs_f64()
            ),
            Err(why) => {
                failures += 1;
                println!(
                    "FAIL {:2} {name} ({:.2} s): {why}",
                    i + 1,
                    took.as_secs_f64()
                );
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
