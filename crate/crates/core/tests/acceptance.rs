//! One line per acceptance criterion.
//!
//! Group arithmetic is re-done here with a plain square-and-multiply so the
//! checks do not lean on the code under test.

use std::collections::HashMap;
use std::hash::Hash;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;
use std::time::{Duration, Instant};

use bpk_rzk::bpk::{keygen_from, pi_v_instance, Params, ProverVariant, SubPath};
use bpk_rzk::circuit::csat::{csat_verify, rep_simulate, CsatStatement};
use bpk_rzk::circuit::Builder;
use bpk_rzk::commitments::{com0_commit, com1_commit, com_verify_opening, Commitment, CommitmentKey, Opening};
use bpk_rzk::harness::attacks::{challenge_replay, reset_attack};
use bpk_rzk::harness::reductions::{extract_concurrent, one_many_demo, run_exp_games};
use bpk_rzk::harness::rzk::{rzk_compare, VStarKind, SIM_CAP};
use bpk_rzk::harness::{run_schedule, Schedule, World};
use bpk_rzk::primitives::{prg_expand, GroupElement, GroupParams};
use bpk_rzk::rszk::one_many::AdversaryKind;
use bpk_rzk::sigma::or::BranchCoins;
use bpk_rzk::sigma::{Instance, OrInstance, SigmaTranscript, Witness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Check = Result<String, String>;

fn modpow(b: u64, mut e: u64, m: u64) -> u64 {
    let (mut acc, mut b, m) = (1u128, b as u128 % m as u128, m as u128);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

fn gexp(g: &GroupParams, x: u64) -> u64 {
    modpow(g.g, x, g.p)
}

fn mulp(g: &GroupParams, a: u64, b: u64) -> u64 {
    (a as u128 * b as u128 % g.p as u128) as u64
}

fn el(g: &GroupParams, v: u64) -> GroupElement {
    g.element(v).expect("subgroup element")
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tally<T: Hash + Eq>(items: impl IntoIterator<Item = T>) -> HashMap<T, usize> {
    let mut m = HashMap::new();
    for x in items {
        *m.entry(x).or_insert(0) += 1;
    }
    m
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn tiny() -> Params {
    Params::tiny()
}

fn tiny_b() -> Params {
    Params { path: SubPath::B, ..Params::tiny() }
}

fn c1_completeness() -> Check {
    let t0 = Instant::now();
    let mut accepted = 0;
    for seed in 0..10 {
        let mut w = World::new(tiny(), seed).map_err(|e| e.to_string())?;
        let xs: Vec<_> = (0..100).map(|i| w.statement(i).0).collect();
        let r = run_schedule(&mut w, &Schedule::round_robin(&xs, SubPath::A)).map_err(|e| e.to_string())?;
        accepted += r.verdicts.iter().filter(|v| v.as_ref().is_some_and(|v| v.accepted())).count();
    }
    let el = t0.elapsed();
    ensure(accepted == 1000 && el < Duration::from_secs(60), || format!("{accepted}/1000 in {}", secs(el)))?;
    Ok(format!("1000/1000 honest sessions accepted in {}", secs(el)))
}

/// Two accepting transcripts on one first message, then extraction.
fn fork(inst: &Instance, w: &Witness, rng: &mut ChaCha20Rng) -> Result<Witness, String> {
    let (a, st) = inst.commit(w, rng).map_err(|e| e.to_string())?;
    let e1 = inst.random_challenge(rng);
    let e2 = loop {
        let e = inst.random_challenge(rng);
        if e != e1 {
            break e;
        }
    };
    let t1 = SigmaTranscript { a: a.clone(), e: e1, z: inst.respond(&st, e1).map_err(|e| e.to_string())? };
    let t2 = SigmaTranscript { a, e: e2, z: inst.respond(&st, e2).map_err(|e| e.to_string())? };
    if !inst.verify_transcript(&t1) || !inst.verify_transcript(&t2) {
        return Err("honest transcript rejected".into());
    }
    inst.extract(&t1, &t2).map_err(|e| e.to_string())
}

fn c2_special_soundness() -> Check {
    let g = Params::small().group;
    let mut rng = ChaCha20Rng::seed_from_u64(2);
    let mut ok = [0usize; 4];
    for _ in 0..500 {
        let (w, r, t) = (g.random_scalar(&mut rng), g.random_scalar(&mut rng), rng.gen_range(1..g.q));
        let h = gexp(&g, t);
        let y = gexp(&g, w);
        let v = modpow(h, w, g.p);
        let c = mulp(&g, y, modpow(h, r, g.p));

        let s = Instance::schnorr(g, el(&g, y));
        if let Witness::Scalar(x) = fork(&s, &Witness::Scalar(w), &mut rng)? {
            ok[0] += (gexp(&g, x) == y) as usize;
        }
        let cp = Instance::chaum_pedersen(g, el(&g, h), el(&g, y), el(&g, v));
        if let Witness::Scalar(x) = fork(&cp, &Witness::Scalar(w), &mut rng)? {
            ok[1] += (gexp(&g, x) == y && modpow(h, x, g.p) == v) as usize;
        }
        let ok_inst = Instance::okamoto(g, el(&g, h), el(&g, y), el(&g, c));
        if let Witness::Pair { w: x, r: s } = fork(&ok_inst, &Witness::Pair { w, r }, &mut rng)? {
            ok[2] += (gexp(&g, x) == y && mulp(&g, gexp(&g, x), modpow(h, s, g.p)) == c) as usize;
        }
    }
    // out = (w0 & w1) ^ p with p = 0
    let mut b = Builder::new(1, 2);
    let (p, w0, w1) = (b.public(0), b.witness(0), b.witness(1));
    let and = b.and(w0, w1);
    let out = b.xor(and, p);
    let circuit = Arc::new(b.finish(out));
    let tg = tiny().group;
    for i in 0..500u32 {
        let stmt = CsatStatement::new(circuit.clone(), vec![false], prg_expand(&i.to_be_bytes(), 24))
            .map_err(|e| e.to_string())?;
        let inst = Instance::circuit(tg, Arc::new(stmt), 8);
        if let Witness::Wires(bits) = fork(&inst, &Witness::Wires(vec![true, true]), &mut rng)? {
            ok[3] += (bits.len() == 2 && (bits[0] & bits[1]) ^ false) as usize;
        }
    }
    ensure(ok == [500; 4], || format!("schnorr/cp/okamoto/csat extracted {ok:?} of 500"))?;
    Ok("500/500 forks extracted and re-verified for each of schnorr, cp, okamoto, csat".into())
}

fn c3_or_wi() -> Check {
    let g = tiny().group;
    let (xw, yw, r, t) = (4u64, 6u64, 9u64, 5u64);
    let h = gexp(&g, t);
    let (x, y) = (gexp(&g, xw), gexp(&g, yw));
    let c = mulp(&g, y, modpow(h, r, g.p));
    let or = OrInstance::new(vec![
        Instance::schnorr(g, el(&g, x)).with_group_bits(),
        Instance::okamoto(g, el(&g, h), el(&g, y), el(&g, c)).with_group_bits(),
    ])
    .map_err(|e| e.to_string())?;
    let q = g.q;
    let ebits = 1u64 << g.challenge_bits();
    let coins0 = |e: u64| {
        let mut v = Vec::new();
        for k in 0..q {
            for e1 in 0..ebits {
                for z0 in 0..q {
                    for z1 in 0..q {
                        v.push([
                            BranchCoins { nonces: vec![k], e: 0, z: vec![] },
                            BranchCoins { nonces: vec![], e: e1, z: vec![z0, z1] },
                        ]);
                    }
                }
            }
        }
        (e, v)
    };
    let coins1 = |e: u64| {
        let mut v = Vec::new();
        for k0 in 0..q {
            for k1 in 0..q {
                for e0 in 0..ebits {
                    for z in 0..q {
                        v.push([
                            BranchCoins { nonces: vec![], e: e0, z: vec![z] },
                            BranchCoins { nonces: vec![k0, k1], e: 0, z: vec![] },
                        ]);
                    }
                }
            }
        }
        (e, v)
    };
    let w0 = [Some(Witness::Scalar(xw)), None];
    let w1 = [None, Some(Witness::Pair { w: yw, r })];
    let mut total = 0;
    for e in 0..ebits {
        let mut dists = Vec::new();
        for ((e, coins), (wits, free)) in [(coins0(e), (&w0, 0usize)), (coins1(e), (&w1, 1usize))] {
            let mut ts = Vec::with_capacity(coins.len());
            for cs in &coins {
                let (a, pr) = or.commit_with_coins(wits, cs).map_err(|e| e.to_string())?;
                let z = or.respond(&pr, e, free).map_err(|e| e.to_string())?;
                ensure(or.verify(&a, e, &z), || format!("transcript rejected at e={e}"))?;
                ts.push((a, z));
            }
            total += ts.len();
            dists.push(tally(ts));
        }
        ensure(dists[0] == dists[1], || format!("transcript distributions differ at e={e}"))?;
    }
    Ok(format!("{total} transcripts enumerated, identical multisets for both witnesses at every challenge"))
}

fn c4_pv_hiding() -> Check {
    let g = tiny().group;
    let kp = keygen_from(g, 3, 0, 7);
    ensure(kp.pk.y(0).value() == gexp(&g, 3) && kp.pk.y(1).value() == gexp(&g, 7), || "key mismatch".into())?;
    let pv = pi_v_instance(&kp.pk);
    let ebits = 1u64 << g.challenge_bits();
    let mut dists = Vec::new();
    for b in 0..2usize {
        let wits = if b == 0 { [Some(Witness::Scalar(3)), None] } else { [None, Some(Witness::Scalar(7))] };
        let mut firsts = Vec::new();
        for k in 0..g.q {
            for e in 0..ebits {
                for z in 0..g.q {
                    let held = BranchCoins { nonces: vec![k], e: 0, z: vec![] };
                    let sim = BranchCoins { nonces: vec![], e, z: vec![z] };
                    let coins = if b == 0 { [held, sim] } else { [sim, held] };
                    firsts.push(pv.commit_with_coins(&wits, &coins).map_err(|e| e.to_string())?.0);
                }
            }
        }
        dists.push(tally(firsts));
    }
    ensure(dists[0] == dists[1], || "first-message distributions differ between b=0 and b=1".into())?;
    Ok(format!("{} distinct first messages, identical distribution for b=0 and b=1", dists[0].len()))
}

fn c5_commitments() -> Check {
    let g = tiny().group;
    let key = CommitmentKey::public(g);
    let h = key.h.value();
    let mut owner: HashMap<(u64, u64), u64> = HashMap::new();
    let mut all = Vec::new();
    for m in 0..g.q {
        for r in 0..g.q {
            let c = com0_commit(&key, m, r).map_err(|e| e.to_string())?;
            let (u, v) = (gexp(&g, r), mulp(&g, modpow(h, r, g.p), gexp(&g, m)));
            ensure((c.u.value(), c.v.value()) == (u, v), || format!("com0({m},{r}) differs from g^r, h^r g^m"))?;
            if let Some(&m0) = owner.get(&(u, v)) {
                ensure(m0 == m, || format!("com0 collision between messages {m0} and {m}"))?;
            }
            owner.insert((u, v), m);
            all.push((Commitment::ElGamal(c), m));
        }
    }
    let mut double = 0;
    for (c, m) in &all {
        for m2 in (0..g.q).filter(|x| x != m) {
            for r2 in 0..g.q {
                double += com_verify_opening(&key, c, &Opening::Scalar { message: m2, randomness: r2 }) as usize;
            }
        }
    }
    ensure(double == 0, || format!("{double} second openings accepted"))?;

    let dist = |m: u64| -> Result<HashMap<u64, usize>, String> {
        let cs: Result<Vec<u64>, String> = (0..g.q)
            .map(|r| com1_commit(&key, m, r).map(|c| c.c.value()).map_err(|e| e.to_string()))
            .collect();
        Ok(tally(cs?))
    };
    let d0 = dist(0)?;
    for m in 1..g.q {
        ensure(dist(m)? == d0, || format!("com1 distribution of {m} differs from 0"))?;
    }
    Ok(format!("com0: no double opening over {} pairs; com1: all {} messages identically distributed", all.len(), g.q))
}

fn c6_uniqueness() -> Check {
    let mut resets = 0;
    for (params, s, want) in [(tiny(), 4, 100), (tiny_b(), 2, 12)] {
        let mut w = World::new(params, 6).map_err(|e| e.to_string())?;
        let xs: Vec<_> = (0..s).map(|i| w.statement(i).0).collect();
        let sched = Schedule::with_resets(&xs, params.path, want, 6);
        let r = run_schedule(&mut w, &sched).map_err(|e| e.to_string())?;
        ensure(r.resets >= want, || format!("only {} resets", r.resets))?;
        ensure(r.prefixes_unique && r.releases_unique, || format!("{:?}: prefix answered twice", params.path))?;
        resets += r.resets;
    }
    let rep = challenge_replay(tiny(), ProverVariant::FULL, 2000, 6).map_err(|e| e.to_string())?;
    let bound = 1.0 / 256.0 + 0.015;
    // a second release for (c_e, a) is exactly a replay that got through
    ensure(rep.prefixes_unique && rep.releases_unique_violations == rep.accepted, || {
        format!("{} double releases for {} accepted replays", rep.releases_unique_violations, rep.accepted)
    })?;
    ensure(rep.rate() <= bound, || format!("replay acceptance {:.4} > {bound:.4}", rep.rate()))?;
    Ok(format!(
        "{resets} resets with unique prefixes; replay acceptance {}/2000 = {:.4} <= {bound:.4}",
        rep.accepted,
        rep.rate()
    ))
}

fn c7_reset_attack() -> Check {
    let t0 = Instant::now();
    let mut parts = Vec::new();
    for v in ProverVariant::ALL {
        let r = reset_attack(tiny(), v, 100, 7).map_err(|e| e.to_string())?;
        ensure(r.witnesses_verified, || format!("{}: unverified witness", v.name()))?;
        if v == ProverVariant::NO_PRF_NO_SUBPROOF {
            ensure(r.successes == 100, || format!("weakened prover leaked {}/100", r.successes))?;
        }
        if v == ProverVariant::FULL {
            ensure(r.successes == 0 && r.prefixes_unique, || format!("full prover leaked {}/100", r.successes))?;
        }
        parts.push(format!("{} {}/100", v.name(), r.successes));
    }
    let el = t0.elapsed();
    ensure(el < Duration::from_secs(120), || format!("took {}", secs(el)))?;
    Ok(format!("{} in {}", parts.join(", "), secs(el)))
}

fn extract_ok(params: Params, seed: u64) -> Result<bool, String> {
    let s = 4;
    let j = seed as usize % s;
    let r = extract_concurrent(params, s, j, Some(j), seed).map_err(|e| e.to_string())?;
    let g = params.group;
    let good = r.outcome.preimage().is_some_and(|x| gexp(&g, x) == r.y) && r.attempts <= r.cap;
    Ok(good && (params.path == SubPath::A || r.lambda_asserted))
}

fn c8_extraction() -> Check {
    let t0 = Instant::now();
    let mut a = 0;
    for seed in 0..100 {
        a += extract_ok(tiny(), seed)? as usize;
    }
    let ta = t0.elapsed();
    let t1 = Instant::now();
    let mut b = 0;
    for seed in 0..10 {
        b += extract_ok(tiny_b(), 1000 + seed)? as usize;
    }
    let tb = t1.elapsed();
    ensure(a >= 95 && b >= 8, || format!("path A {a}/100, path B {b}/10"))?;
    ensure(tb < Duration::from_secs(1800), || format!("path B took {}", secs(tb)))?;
    Ok(format!("path A {a}/100 in {}, path B {b}/10 in {}, every preimage re-checked", secs(ta), secs(tb)))
}

fn c9_exp_games() -> Check {
    let g = tiny().group;
    let mut same = 0;
    for seed in 0..100 {
        let r = run_exp_games(tiny(), seed, false).map_err(|e| e.to_string())?;
        ensure(r.violation.is_none(), || format!("seed {seed}: violation with an honest key"))?;
        same += r.a_identical as usize;
    }
    let mut caught = 0;
    for seed in 0..20 {
        let r = run_exp_games(tiny(), seed, true).map_err(|e| e.to_string())?;
        let Some(v) = r.violation else { continue };
        let Commitment::Pedersen(c) = v.commitment else { return Err("violation is not on COM1".into()) };
        let h = r.ck.h.value();
        let opens = |o: &Opening| match *o {
            Opening::Scalar { message, randomness } => {
                com_verify_opening(&r.ck, &v.commitment, o)
                    && mulp(&g, gexp(&g, message), modpow(h, randomness, g.p)) == c.c.value()
            }
            _ => false,
        };
        let differ = !matches!((&v.first, &v.second), (Opening::Scalar { message: a, .. }, Opening::Scalar { message: b, .. }) if a == b);
        caught += (opens(&v.first) && opens(&v.second) && differ && v.is_valid(&r.ck)) as usize;
    }
    ensure(same == 100 && caught == 20, || format!("a identical {same}/100, trapdoor violations {caught}/20"))?;
    Ok(format!("a identical across games {same}/100; trapdoor key gave {caught}/20 valid double openings"))
}

fn c10_one_many() -> Check {
    let kinds = [AdversaryKind::Const(0x5a), AdversaryKind::Echo, AdversaryKind::Mixer { k: 1, m: 2 }];
    let mut ok = 0;
    for kind in kinds {
        for seed in 0..20u64 {
            let d = one_many_demo(kind, 3, seed as usize % 3, 8, seed).map_err(|e| e.to_string())?;
            ensure(d.lambda_asserted, || format!("{kind:?} seed {seed}: Λ branch not asserted"))?;
            ensure(d.real_accept == d.sim_accept, || format!("{kind:?} seed {seed}: real and simulated differ"))?;
            ok += 1;
        }
    }
    Ok(format!("{ok}/60 runs: simulated session used Λ and the adversary's bit matched"))
}

fn c11_rzk() -> Check {
    let mut max_attempts = 0;
    let mut runs = 0;
    for kind in [VStarKind::HonestLike, VStarKind::Resetting { resets: 10 }, VStarKind::Aborting] {
        for seed in 0..20 {
            let [real, sim, hsim] = rzk_compare(tiny(), kind, 3, seed).map_err(|e| e.to_string())?;
            ensure(real.outcomes == sim.outcomes && real.outcomes == hsim.outcomes, || {
                format!("{kind:?} seed {seed}: {:?} / {:?} / {:?}", real.outcomes, sim.outcomes, hsim.outcomes)
            })?;
            ensure(sim.attempts <= SIM_CAP && hsim.attempts <= SIM_CAP, || format!("seed {seed}: over budget"))?;
            ensure(real.prefixes_unique && sim.prefixes_unique && hsim.prefixes_unique, || "prefix reuse".into())?;
            max_attempts = max_attempts.max(sim.attempts);
            runs += 1;
        }
    }
    Ok(format!("{runs} verifiers: real, sim and hsim outputs equal; max rewinds {max_attempts} <= {SIM_CAP}"))
}

fn c12_csat_soundness() -> Check {
    let g = tiny().group;
    // w & !w: no witness
    let mut b = Builder::new(0, 1);
    let w = b.witness(0);
    let nw = b.not(w);
    let out = b.and(w, nw);
    let circuit = Arc::new(b.finish(out));
    let stmt = CsatStatement::new(circuit, vec![], prg_expand(b"false", 24)).map_err(|e| e.to_string())?;
    let inst = Instance::circuit(g, Arc::new(stmt.clone()), 8);
    ensure(!inst.relation_holds(&Witness::Wires(vec![false])) && !inst.relation_holds(&Witness::Wires(vec![true])), || {
        "circuit is satisfiable".into()
    })?;
    let mut rng = ChaCha20Rng::seed_from_u64(12);
    let trials = 2000;
    let mut accepted = 0;
    for _ in 0..trials {
        let guess: u64 = rng.gen_range(0..256);
        let (commits, resps): (Vec<_>, Vec<_>) =
            (0..8).map(|i| rep_simulate(&stmt, (guess >> i) & 1 == 1, &mut rng)).unzip();
        let e: u64 = rng.gen_range(0..256);
        let ok = csat_verify(&stmt, &commits, e, &resps);
        ensure(e != guess || ok, || "cheater rejected on its own guess".into())?;
        accepted += ok as usize;
    }
    let rate = accepted as f64 / trials as f64;
    ensure((0.001..=0.02).contains(&rate), || format!("acceptance {rate:.4} outside [0.001, 0.02]"))?;
    Ok(format!("false circuit accepted {accepted}/{trials} = {rate:.4} at t=8"))
}

fn main() {
    let criteria: [(&str, fn() -> Check); 12] = [
        ("honest completeness", c1_completeness),
        ("special soundness", c2_special_soundness),
        ("OR witness indistinguishability", c3_or_wi),
        ("verifier key hiding", c4_pv_hiding),
        ("commitment binding and hiding", c5_commitments),
        ("resettable uniqueness", c6_uniqueness),
        ("reset attack", c7_reset_attack),
        ("concurrent extraction", c8_extraction),
        ("extracting games", c9_exp_games),
        ("one-many simulation", c10_one_many),
        ("resettable zero knowledge", c11_rzk),
        ("circuit soundness", c12_csat_soundness),
    ];
    let mut failed = Vec::new();
    for (i, (name, f)) in criteria.into_iter().enumerate() {
        let t0 = Instant::now();
        let res = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match &res {
            Ok(d) => ("PASS", d.as_str()),
            Err(d) => ("FAIL", d.as_str()),
        };
        println!("criterion {:>2} {tag} {name}: {detail} [{}]", i + 1, secs(t0.elapsed()));
        if res.is_err() {
            failed.push(i + 1);
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
