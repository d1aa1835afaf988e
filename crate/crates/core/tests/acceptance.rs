//! Acceptance runner: one line per criterion, nonzero exit on any failure.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbar_core::field::rat;
use sbar_core::genfun::{
    build_qn, identity_suite, index_signature, maslov_index_check, rotation_barcode,
    smith_fixed_locus_check, GFTuple, DEFAULT_N0, DEFAULT_TOL,
};
use sbar_core::periodic::{beta_stats, betamax_validate, betatot_integral, homological_count, hz_certificate};
use sbar_core::pjoin::{associativity_sweep, binomial_identity_check, homological_length_join, pj_pullback, ProjClass};
use sbar_core::{bottleneck_distance, compute_barcode, parse_complex, smith_dimension_check, Bar, Barcode, Extended, FieldSpec};

type Outcome = Result<String, String>;

fn check(cond: bool, ok: String, bad: String) -> Outcome {
    if cond { Ok(ok) } else { Err(bad) }
}

fn c1_qn_signatures() -> Outcome {
    let start = Instant::now();
    for n in [1usize, 3, 5, 7] {
        for d in 0..=2usize {
            let s = index_signature(&build_qn(n, d).map_err(|e| e.to_string())?, 1e-9)
                .map_err(|e| e.to_string())?
                .real();
            let want = (n - 1) * (d + 1);
            if s.minus != want || s.plus != want || s.zero != 2 * (d + 1) {
                return Err(format!("n={n} d={d}: ind={} coind={} null={}", s.minus, s.plus, s.zero));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 5.0, format!("12 cases in {secs:.2}s"), format!("took {secs:.2}s"))
}

fn c2_maslov() -> Outcome {
    let mut seen = Vec::new();
    for d in 0..=1usize {
        for t in [-1.5, -0.5, 0.5, 1.5] {
            let r = maslov_index_check(d, 2, t, DEFAULT_N0, DEFAULT_TOL).map_err(|e| e.to_string())?;
            if !r.holds {
                return Err(format!("d={d} t={t}: {r:?}"));
            }
            seen.push(format!("{}", r.kappa_difference));
        }
    }
    Ok(format!("index of {{T ≤ 0}} jumps {} match 2(d+1)⌊t⌋", seen.join(",")))
}

fn c3_rotation() -> Outcome {
    let start = Instant::now();
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    let r = rotation_barcode(&[0.0, golden], 2, 3, DEFAULT_N0, 256, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let k = beta_stats(&r.barcode).k;
    let n = homological_count(&r.barcode);
    let bm = betamax_validate(&r.barcode).holds;
    check(
        k == 0 && n == 2 && r.max_action_deviation < 1e-6 && bm && secs < 30.0,
        format!("K=0 N=2 deviation={:.1e} in {secs:.1}s", r.max_action_deviation),
        format!("K={k} N={n} deviation={:e} betamax={bm} {secs:.1}s", r.max_action_deviation),
    )
}

fn c4_betatot_integral() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for i in 0..200 {
        let pb = common::random_periodic(&mut rng, 5);
        let want = beta_stats(&pb).beta_tot;
        for _ in 0..5 {
            let a = common::random_rational_unit(&mut rng) + rat(rng.random_range(-5..=5), 1);
            let n = rng.random_range(1..=6u32);
            let got = betatot_integral(&pb, &a, n).map_err(|e| e.to_string())?.beta_tot;
            if got != want {
                return Err(format!("instance {i}: a={a} n={n}: {got} ≠ {want}"));
            }
        }
    }
    Ok("1000 exact evaluations".into())
}

fn c5_barcode_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut bars = 0;
    for field in [FieldSpec::Rationals, FieldSpec::Prime(2), FieldSpec::Prime(3)] {
        for i in 0..50 {
            let c = common::random_complex(&mut rng, field, 6);
            let fast = compute_barcode(&c);
            if fast != common::brute_barcode(&c) {
                return Err(format!("{field} instance {i}:\n{}", c.to_text(None)));
            }
            bars += fast.total();
        }
    }
    Ok(format!("150 complexes, {bars} bars"))
}

fn c6_torsion() -> Outcome {
    let c = parse_complex("gen x 0 0\ngen y 1 1\ngen z 2 2\nbnd z 2 y\n").map_err(|e| e.to_string())?;
    let q = compute_barcode(&c);
    let f2 = compute_barcode(&c.over_field(FieldSpec::Prime(2)).map_err(|e| e.to_string())?);
    let fin = |k, b, d| Bar::new(k, rat(b, 1), Extended::Finite(rat(d, 1)));
    let inf = |k, b| Bar::new(k, rat(b, 1), Extended::Infinite);
    let want_q = Barcode::new(FieldSpec::Rationals, vec![inf(0, 0), fin(1, 1, 2)]).unwrap();
    let want_2 = Barcode::new(FieldSpec::Prime(2), vec![inf(0, 0), inf(1, 1), inf(2, 2)]).unwrap();
    check(
        q == want_q && f2 == want_2,
        "Q: deg1 [1,2); F2: deg1 [1,inf), deg2 [2,inf)".into(),
        format!("Q: {q} F2: {f2}"),
    )
}

fn c7_identities() -> Outcome {
    let mut worst: Vec<(&str, f64)> = vec![("bmn", 0.0), ("finverse", 0.0), ("fcyclic", 0.0), ("antisymmetry", 0.0), ("smith-odd", 0.0), ("smith-2", 0.0)];
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
        let d = rng.random_range(0..=2usize);
        let n = [1usize, 3, 5][rng.random_range(0..3)];
        let m = [1usize, 3, 5][rng.random_range(0..3)];
        let s = GFTuple::random_quadratic(d, n, 0.3, &mut rng);
        let s2 = GFTuple::random_quadratic(d, m, 0.3, &mut rng);
        let r = identity_suite(&s, &s2, 4, seed).map_err(|e| e.to_string())?;
        for (slot, v) in [(0, r.bmn.unwrap_or(0.0)), (1, r.finverse), (2, r.fcyclic), (3, r.antisymmetry)] {
            worst[slot].1 = worst[slot].1.max(v);
        }
        let t = rng.random_range(-1.0..1.0);
        for p in [3u32, 5] {
            let h = (p as i64 - 1) / 2;
            for q in -h..=h {
                let r = smith_fixed_locus_check(&s, 1, t, DEFAULT_N0, p, q, 2, seed).map_err(|e| e.to_string())?;
                worst[4].1 = worst[4].1.max(r.max());
            }
        }
        for q in 0..=1 {
            let r = smith_fixed_locus_check(&s, 1, t, DEFAULT_N0, 2, q, 2, seed).map_err(|e| e.to_string())?;
            worst[5].1 = worst[5].1.max(r.max());
        }
    }
    let summary = worst.iter().map(|(k, v)| format!("{k}={v:.1e}")).collect::<Vec<_>>().join(" ");
    check(worst.iter().all(|(_, v)| *v < 1e-8), summary.clone(), summary)
}

fn c8_smith_complexes() -> Outcome {
    let mut count = 0;
    let mut sphere = None;
    for p in [2u32, 3, 5] {
        for (name, c, a) in common::smith_models(p) {
            let r = smith_dimension_check(&c, &a).map_err(|e| e.to_string())?;
            if !r.holds {
                return Err(format!("{name}: {r:?}"));
            }
            if p == 2 && name.starts_with("rotated sphere") {
                sphere = Some((r.dim_total, r.dim_fixed));
            }
            count += 1;
        }
    }
    check(
        count >= 20 && sphere == Some((2, 2)),
        format!("{count} complexes, S² half-turn dimTotal=2 dimFixed=2"),
        format!("{count} complexes, sphere {sphere:?}"),
    )
}

fn c9_pjoin() -> Outcome {
    for k in 1..=8u32 {
        let p = pj_pullback(k, 8, 8).map_err(|e| e.to_string())?;
        for i in 0..=8 {
            for j in 0..=8 {
                if p.coefficient(i, j) != i64::from(i + j + 1 == k) {
                    return Err(format!("pullback k={k} at u1^{i}u2^{j}"));
                }
            }
        }
        if !binomial_identity_check(k, 8, 8).map_err(|e| e.to_string())? {
            return Err(format!("binomial k={k}"));
        }
    }
    let failures = associativity_sweep(5).map_err(|e| e.to_string())?;
    if !failures.is_empty() {
        return Err(format!("associativity fails at {failures:?}"));
    }
    for la in 1..=6 {
        for lb in 1..=6 {
            let j = homological_length_join(la, lb).map_err(|e| e.to_string())?;
            if j.length != la + lb || !j.verified || j.witness != ProjClass::basis(la + lb - 1, la + lb - 1).unwrap() {
                return Err(format!("length ({la},{lb}) → {j:?}"));
            }
        }
    }
    Ok("pullback k≤8, binomial k≤8, 216 associativity triples, 36 join lengths".into())
}

fn c10_certificate() -> Outcome {
    let primes: Vec<u32> = (2..=200).filter(|&p| (2..p).all(|q| p % q != 0)).collect();
    let cert = hz_certificate(1, &rat(1, 5), 3, &rat(4, 1), &primes).map_err(|e| e.to_string())?;
    // With β_tot = 1/5: 2 + 2p/5 > 12 first holds at the prime after 25.
    let brute = primes.iter().copied().find(|&p| 2 * 5 + 2 * p as i64 > 12 * 5);
    check(
        cert.min_prime_a == Some(29) && brute == Some(29),
        "A=29, brute-force scan agrees".into(),
        format!("certificate {:?}, scan {brute:?}", cert.min_prime_a),
    )
}

fn c11_bottleneck() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..60 {
        let a = common::random_barcode(&mut rng, 8);
        let b = common::random_barcode(&mut rng, if i % 5 == 0 { 8 } else { 5 });
        let fast = bottleneck_distance(&a, &b);
        let slow = common::brute_bottleneck(&a, &b);
        if fast != slow {
            return Err(format!("instance {i}: {fast} vs {slow}\n{a}\n{b}"));
        }
    }
    for i in 0..50 {
        let c = common::random_complex(&mut rng, FieldSpec::Rationals, 7);
        let eps = rat(rng.random_range(1..=8), 8);
        let moved = common::perturb(&c, &eps, &mut rng);
        let dist = bottleneck_distance(&compute_barcode(&c), &compute_barcode(&moved));
        if dist > Extended::Finite(eps.clone()) {
            return Err(format!("perturbation {i}: distance {dist} > {eps}"));
        }
    }
    Ok("60 barcode pairs against enumeration, 50 perturbations within ε".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 11] = [
        ("C1 Q_n signatures", c1_qn_signatures),
        ("C2 Maslov jump", c2_maslov),
        ("C3 rotation pipeline", c3_rotation),
        ("C4 betatot integral", c4_betatot_integral),
        ("C5 barcode oracle", c5_barcode_oracle),
        ("C6 field sensitivity", c6_torsion),
        ("C7 identity residuals", c7_identities),
        ("C8 Smith on complexes", c8_smith_complexes),
        ("C9 projective join", c9_pjoin),
        ("C10 HZ certificate", c10_certificate),
        ("C11 bottleneck", c11_bottleneck),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {name}: {msg} [{secs:.2}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {name}: {msg} [{secs:.2}s]");
            }
        }
    }
    println!("{} of 11 criteria passed", 11 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
