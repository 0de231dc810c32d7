use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use bpk_rzk::bpk::{keygen, Params, ProverVariant, PublicFile, SubPath};
use bpk_rzk::harness::attacks::{challenge_replay, reset_attack};
use bpk_rzk::harness::reductions::{extract_concurrent, one_many_demo, run_exp_games, ExtractOutcome};
use bpk_rzk::harness::rzk::{rzk_compare, VStarKind, SIM_CAP};
use bpk_rzk::harness::{run_schedule, HarnessError, Schedule, World};
use bpk_rzk::primitives::{GroupParams, Profile as GroupProfile};
use bpk_rzk::rszk::one_many::AdversaryKind;
use bpk_rzk::vectors;

#[derive(Parser)]
#[command(name = "bpk-rzk", version, about = "Resettable ZK in the bare public-key model: sessions, attacks, reductions")]
struct Cli {
    #[command(flatten)]
    cfg: Config,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Profile {
    Tiny,
    Small,
    /// Tiny group, Barak sub-protocol with n = 8.
    ToyBarak,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum PathArg {
    A,
    B,
}

#[derive(Args)]
struct Config {
    #[arg(long, value_enum, default_value = "tiny", global = true)]
    profile: Profile,
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
    /// Sub-protocol repetitions.
    #[arg(long, default_value_t = 8, global = true)]
    t: usize,
    /// Overrides the sub-protocol path of the profile.
    #[arg(long, value_enum, global = true)]
    path: Option<PathArg>,
    /// Writes the log here instead of stdout.
    #[arg(long, global = true)]
    log: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a verifier key and print its public-file record.
    Keygen {
        #[arg(long)]
        public_file: Option<PathBuf>,
    },
    /// One honest session.
    Run,
    /// Several sessions under a schedule.
    Concurrent {
        #[arg(long, default_value_t = 4)]
        sessions: usize,
        /// Schedule file; round robin when absent.
        #[arg(long)]
        schedule: Option<PathBuf>,
        /// Random interleaving with this many resets (ignored with --schedule).
        #[arg(long)]
        resets: Option<usize>,
    },
    /// Resetting-verifier attacks.
    Attack {
        #[arg(value_enum)]
        kind: AttackKind,
        /// full, no-prf, no-subproof or no-prf-no-subproof.
        #[arg(long, default_value = "full")]
        variant: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Reduction demos.
    Reduce {
        #[command(subcommand)]
        demo: Demo,
    },
    /// Rewrite the frozen vector files.
    FreezeVectors {
        #[arg(long, default_value = "vectors")]
        dir: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AttackKind {
    Reset,
    ChallengeReplay,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AdvArg {
    Const,
    Echo,
    Mixer,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum VStarArg {
    Honest,
    Resetting,
    Aborting,
}

#[derive(Subcommand)]
enum Demo {
    /// Extra: rewind session j of a concurrent cheating prover.
    Extract {
        #[arg(long, default_value_t = 4)]
        sessions: usize,
        #[arg(long, default_value_t = 0)]
        j: usize,
        /// Session where the prover uses the key preimage; defaults to j.
        #[arg(long)]
        cheat: Option<usize>,
        /// Prover honest in every session.
        #[arg(long, conflicts_with = "cheat")]
        honest: bool,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Extracting games 0 and 1 from one snapshot.
    Exp01 {
        #[arg(long, default_value_t = 1)]
        trials: usize,
        /// Give the prover the commitment trapdoor.
        #[arg(long)]
        trapdoor: bool,
    },
    /// One-many simulation of the Barak skeleton.
    OneMany {
        #[arg(long, value_enum, default_value = "mixer")]
        adversary: AdvArg,
        #[arg(long, default_value_t = 3)]
        sessions: usize,
        #[arg(long, default_value_t = 0)]
        j: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Real vs Sim vs HSim against a deterministic verifier.
    RzkSim {
        #[arg(long, value_enum, default_value = "honest")]
        vstar: VStarArg,
        #[arg(long, default_value_t = 3)]
        sessions: usize,
        #[arg(long, default_value_t = 10)]
        resets: usize,
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
}

enum Failure {
    Protocol(String),
    Internal(String),
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Schedule(_) | HarnessError::Snapshot(_) => Failure::Internal(e.to_string()),
            other => Failure::Protocol(other.to_string()),
        }
    }
}

struct Out {
    log: String,
    result: String,
    ok: bool,
}

fn params(cfg: &Config) -> Params {
    let mut p = match cfg.profile {
        Profile::Tiny => Params::tiny(),
        Profile::Small => Params::small(),
        Profile::ToyBarak => Params { path: SubPath::B, ..Params::tiny() },
    };
    p.t = cfg.t;
    match cfg.path {
        Some(PathArg::A) => p.path = SubPath::A,
        Some(PathArg::B) => p.path = SubPath::B,
        None => {}
    }
    p
}

fn trial_seed(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(i as u64)
}

fn profile_name(cfg: &Config) -> &'static str {
    match cfg.profile {
        Profile::Tiny => "tiny",
        Profile::Small => "small",
        Profile::ToyBarak => "toy-barak",
    }
}

fn dispatch(cli: &Cli) -> Result<Out, Failure> {
    let cfg = &cli.cfg;
    let p = params(cfg);
    p.check().map_err(|e| Failure::Internal(e.to_string()))?;
    let mut log = String::new();
    let out = match &cli.cmd {
        Cmd::Keygen { public_file } => {
            let group = GroupParams::generate(
                if cfg.profile == Profile::Small { GroupProfile::Small } else { GroupProfile::Tiny },
                0,
            );
            let kp = keygen(group, cfg.seed);
            let mut file = PublicFile::new();
            file.register(kp.pk).map_err(|e| Failure::Internal(e.to_string()))?;
            let text = file.to_text();
            match public_file {
                Some(path) => std::fs::write(path, &text).map_err(|e| Failure::Internal(e.to_string()))?,
                None => log.push_str(&text),
            }
            Out { log, result: format!("cmd=keygen profile={} records={}", profile_name(cfg), file.len()), ok: true }
        }
        Cmd::Run => {
            let mut w = World::new(p, cfg.seed)?;
            let x = w.statement(0).0;
            let rep = run_schedule(&mut w, &Schedule::round_robin(&[x], p.path))?;
            let ok = rep.verdicts[0].as_ref().is_some_and(|v| v.accepted());
            let word = if ok { "accept" } else { "reject" };
            Out { log: rep.log, result: format!("cmd=run profile={} verdict={word}", profile_name(cfg)), ok }
        }
        Cmd::Concurrent { sessions, schedule, resets } => {
            let mut w = World::new(p, cfg.seed)?;
            let xs: Vec<_> = (0..*sessions).map(|i| w.statement(i).0).collect();
            let sched = match (schedule, resets) {
                (Some(path), _) => {
                    let text = std::fs::read_to_string(path).map_err(|e| Failure::Internal(e.to_string()))?;
                    Schedule::parse(&text, &p)?
                }
                (None, Some(r)) => Schedule::with_resets(&xs, p.path, *r, cfg.seed),
                (None, None) => Schedule::round_robin(&xs, p.path),
            };
            let rep = run_schedule(&mut w, &sched)?;
            let accepted = rep.verdicts.iter().filter(|v| v.as_ref().is_some_and(|v| v.accepted())).count();
            let n = rep.verdicts.len();
            Out {
                log: rep.log,
                result: format!(
                    "cmd=concurrent sessions={n} accepted={accepted} resets={} prefixes_unique={} releases_unique={}",
                    rep.resets, rep.prefixes_unique, rep.releases_unique
                ),
                ok: accepted == n,
            }
        }
        Cmd::Attack { kind, variant, trials } => {
            let v = ProverVariant::parse(variant).ok_or_else(|| Failure::Internal(format!("unknown variant `{variant}`")))?;
            match kind {
                AttackKind::Reset => {
                    let r = reset_attack(p, v, *trials, cfg.seed)?;
                    writeln!(log, "success {}/{}", r.successes, r.trials).ok();
                    Out {
                        log,
                        result: format!(
                            "cmd=attack-reset variant={} trials={} success={} avenue1={} avenue2={} witnesses_verified={} prefixes_unique={} ms={}",
                            v.name(),
                            r.trials,
                            r.successes,
                            r.by_avenue[0],
                            r.by_avenue[1],
                            r.witnesses_verified,
                            r.prefixes_unique,
                            r.elapsed.as_millis()
                        ),
                        ok: true,
                    }
                }
                AttackKind::ChallengeReplay => {
                    let r = challenge_replay(p, v, *trials, cfg.seed)?;
                    writeln!(log, "accepted {}/{}", r.accepted, r.trials).ok();
                    Out {
                        log,
                        result: format!(
                            "cmd=attack-challenge-replay variant={} trials={} accepted={} rate={:.5} prefixes_unique={}",
                            v.name(),
                            r.trials,
                            r.accepted,
                            r.rate(),
                            r.prefixes_unique
                        ),
                        ok: true,
                    }
                }
            }
        }
        Cmd::Reduce { demo } => reduce(cfg, p, demo)?,
        Cmd::FreezeVectors { dir } => {
            std::fs::create_dir_all(dir).map_err(|e| Failure::Internal(e.to_string()))?;
            let write = |name: &str, text: String| std::fs::write(dir.join(name), text).map_err(|e| Failure::Internal(e.to_string()));
            write("primitives.txt", vectors::primitives_text())?;
            write("gate_budget.txt", vectors::gate_budget_text())?;
            Out { log, result: format!("cmd=freeze-vectors dir={}", dir.display()), ok: true }
        }
    };
    Ok(out)
}

fn reduce(cfg: &Config, p: Params, demo: &Demo) -> Result<Out, Failure> {
    let mut log = String::new();
    let out = match demo {
        Demo::Extract { sessions, j, cheat, honest, trials } => {
            let cheat = if *honest { None } else { Some(cheat.unwrap_or(*j)) };
            let mut got = 0;
            let mut attempts = 0;
            for i in 0..*trials {
                let r = extract_concurrent(p, *sessions, *j, cheat, trial_seed(cfg.seed, i))?;
                attempts += r.attempts;
                match &r.outcome {
                    ExtractOutcome::Preimage(x) => {
                        got += 1;
                        writeln!(log, "extracted {x:x}").ok();
                    }
                    ExtractOutcome::NoKey => {
                        writeln!(log, "bottom no key extracted").ok();
                    }
                    ExtractOutcome::Bottom(why) => {
                        writeln!(log, "bottom {why}").ok();
                    }
                }
            }
            Out {
                log,
                result: format!("cmd=reduce-extract sessions={sessions} j={j} trials={trials} extracted={got} attempts={attempts}"),
                ok: got > 0,
            }
        }
        Demo::Exp01 { trials, trapdoor } => {
            let mut same = 0;
            let mut violations = 0;
            for i in 0..*trials {
                let r = run_exp_games(p, trial_seed(cfg.seed, i), *trapdoor)?;
                same += r.a_identical as usize;
                if let Some(v) = &r.violation {
                    if v.is_valid(&r.ck) {
                        violations += 1;
                        writeln!(log, "{}", v.to_record()).ok();
                    }
                }
            }
            Out {
                log,
                result: format!("cmd=reduce-exp01 trials={trials} a_identical={same} violations={violations}"),
                ok: same == *trials,
            }
        }
        Demo::OneMany { adversary, sessions, j, trials } => {
            let mut agree = 0;
            let mut asserted = 0;
            for i in 0..*trials {
                let kind = match adversary {
                    AdvArg::Const => AdversaryKind::Const(0x5a),
                    AdvArg::Echo => AdversaryKind::Echo,
                    AdvArg::Mixer => AdversaryKind::Mixer { k: 3, m: 7 },
                };
                let d = one_many_demo(kind, *sessions, *j, p.t, trial_seed(cfg.seed, i))?;
                agree += (d.real_accept == d.sim_accept) as usize;
                asserted += d.lambda_asserted as usize;
                writeln!(log, "one-many {i} real={} sim={} lambda={}", d.real_accept, d.sim_accept, d.lambda_asserted).ok();
            }
            Out {
                log,
                result: format!("cmd=reduce-one-many trials={trials} agree={agree} lambda_asserted={asserted}"),
                ok: agree == *trials && asserted == *trials,
            }
        }
        Demo::RzkSim { vstar, sessions, resets, trials } => {
            let kind = match vstar {
                VStarArg::Honest => VStarKind::HonestLike,
                VStarArg::Resetting => VStarKind::Resetting { resets: *resets },
                VStarArg::Aborting => VStarKind::Aborting,
            };
            let mut agree = 0;
            let mut max_attempts = 0;
            for i in 0..*trials {
                let [real, sim, hsim] = rzk_compare(p, kind, *sessions, trial_seed(cfg.seed, i))?;
                let same = real.outcomes == sim.outcomes && real.outcomes == hsim.outcomes;
                agree += same as usize;
                max_attempts = max_attempts.max(sim.attempts);
                writeln!(log, "rzk {i} real={:?} sim={:?} hsim={:?} sim_attempts={}", real.outcomes, sim.outcomes, hsim.outcomes, sim.attempts).ok();
            }
            Out {
                log,
                result: format!("cmd=reduce-rzk-sim trials={trials} agree={agree} max_sim_attempts={max_attempts} cap={SIM_CAP}"),
                ok: agree == *trials,
            }
        }
    };
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(out) => {
            let mut text = out.log;
            if let Some(path) = &cli.cfg.log {
                if let Err(e) = std::fs::write(path, &text) {
                    eprintln!("error: {e}");
                    return ExitCode::from(3);
                }
                text.clear();
            }
            print!("{text}");
            println!("RESULT {}", out.result);
            ExitCode::from(if out.ok { 0 } else { 1 })
        }
        Err(Failure::Protocol(m)) => {
            eprintln!("error: {m}");
            println!("RESULT error=protocol");
            ExitCode::from(1)
        }
        Err(Failure::Internal(m)) => {
            eprintln!("error: {m}");
            println!("RESULT error=internal");
            ExitCode::from(3)
        }
    }
}
