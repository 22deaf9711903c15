mod manifest;
mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use polysign::bounds;
use polysign::enumerate::{enumerate_patterns, EnumOptions};
use polysign::error::Error;
use polysign::exclusion::{search_certificate, verify_exclusion, ExclusionCertificate};
use polysign::multiplicative::MultiplicativeFn;
use polysign::pattern::{PatternSet, SignPattern};
use polysign::props;
use polysign::rho::Rho;
use polysign::sample::sample_patterns;
use polysign::torus::{Congruence, Model, ModelConfig};

use manifest::RunManifest;
use report::{fmt_f64, Report};

#[derive(Parser)]
#[command(
    name = "polysign",
    version,
    about = "Sign patterns of polynomial floors and torus models for ±1 multiplicative functions"
)]
struct Cli {
    /// Worker threads for parallel stages (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Formula {
    /// Exact pattern-count bound, needs --d and --k.
    Mainbound,
    /// The constant c_d, needs --d.
    C,
    /// Smallest q passing the twist threshold, needs --d.
    Minq,
    /// Exact threshold test at one q, needs --d and --q.
    Main2,
    /// Lower bound 2 m^r / (2r-1)!!, needs --m and --r.
    Back1,
    /// Displayed closed form for the (d+2)-point correlation, needs --d.
    ChowlaClosed,
    /// Exact (d+2)-point correlation of the model, needs --d.
    ChowlaCorr,
    /// Cells-at-a-vertex bound 2 sum C(m-1,i), needs --m and --d.
    Shelah,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PropCheck {
    Back2,
    Back1,
}

#[derive(Subcommand)]
enum Command {
    /// Exactly enumerate the length-k sign patterns of degree-d polynomials.
    Enumerate {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Abort if the predicted number of candidates exceeds this.
        #[arg(long, default_value_t = 1_000_000_000)]
        budget: u128,
    },
    /// Randomized oracle: dyadic sampling plus a grid sweep.
    Sample {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        k: u32,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate one closed-form bound or threshold exactly.
    Bound {
        #[arg(long)]
        formula: Formula,
        #[arg(long)]
        d: Option<u32>,
        #[arg(long)]
        k: Option<u32>,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        r: Option<u32>,
    },
    /// Monte Carlo estimate of E prod_i F(T^{c_i} x) on a model.
    Correlate {
        #[arg(long)]
        d: u32,
        #[arg(long, value_delimiter = ',', required = true)]
        shifts: Vec<u64>,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        q: Option<u32>,
        /// Twist file: a certificate or a single +/- line (needs --q).
        #[arg(long)]
        rho: Option<PathBuf>,
        /// Also write a one-row CSV file (header + row) for sweep scripts.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Monte Carlo Gowers-style box average of a given order.
    Gowers {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        order: u32,
        #[arg(long = "H")]
        h: u64,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        seed: u64,
        /// Congruence r:m on the shift coordinates (repeat per coordinate;
        /// one occurrence applies to all of them).
        #[arg(long = "hmod")]
        hmod: Vec<String>,
        /// Congruence r:m on M(x).
        #[arg(long = "xmod")]
        xmod: Option<String>,
        /// Also write a one-row CSV file (header + row) for sweep scripts.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Chi-square uniformity report for the pushforward along I_a.
    Pushforward {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        a: u64,
        #[arg(long, default_value_t = 16)]
        bins: u32,
        #[arg(long)]
        n: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// Exactly verify the model identities on conditioned samples.
    Axioms {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        amax: u64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        rho: Option<PathBuf>,
    },
    /// Search for a twist under which a prescribed pattern never appears.
    RhoSearch {
        #[arg(long)]
        d: u32,
        #[arg(long)]
        q: u32,
        /// Target pattern, a +/- string of length q.
        #[arg(long)]
        epsilon: String,
        #[arg(long)]
        patterns: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Independently re-verify an exclusion certificate.
    RhoVerify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        patterns: PathBuf,
    },
    /// Check the counting propositions against enumerated pattern sets.
    Props {
        #[arg(long)]
        check: PropCheck,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        r: u32,
        /// Inclusive range a..b of pattern lengths for back1.
        #[arg(long)]
        mrange: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match run(cli, &argv) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::BudgetExceeded { .. } | Error::PhiTooLarge { .. } | Error::ConfigOverflow(_) => 3,
        _ => 2,
    }
}

const PASS: ExitCode = ExitCode::SUCCESS;

fn check_failed() -> ExitCode {
    ExitCode::from(1)
}

fn need<T: Copy>(value: Option<T>, flag: &str, formula: &str) -> Result<T, Error> {
    value.ok_or_else(|| Error::BadArgument(format!("--{flag} is required for formula {formula}")))
}

fn parse_congruence(text: &str) -> Result<Congruence, Error> {
    let (r, m) = text
        .split_once(':')
        .ok_or_else(|| Error::BadArgument(format!("congruence must be r:m, got {text}")))?;
    let residue = r
        .parse()
        .map_err(|_| Error::BadArgument(format!("bad congruence residue {r}")))?;
    let modulus = m
        .parse()
        .map_err(|_| Error::BadArgument(format!("bad congruence modulus {m}")))?;
    Ok(Congruence { residue, modulus })
}

fn parse_mrange(text: &str) -> Result<std::ops::RangeInclusive<u32>, Error> {
    let (a, b) = text
        .split_once("..")
        .ok_or_else(|| Error::BadArgument(format!("range must be a..b, got {text}")))?;
    let a = a
        .parse()
        .map_err(|_| Error::BadArgument(format!("bad range start {a}")))?;
    let b = b
        .trim_start_matches('=')
        .parse()
        .map_err(|_| Error::BadArgument(format!("bad range end {b}")))?;
    Ok(a..=b)
}

fn load_rho(q_flag: Option<u32>, path: &Path) -> Result<(u32, Rho, String), Error> {
    let text = std::fs::read_to_string(path)?;
    if text.starts_with("d=") {
        let cert = ExclusionCertificate::parse(&text)?;
        if let Some(q) = q_flag {
            if q != cert.q {
                return Err(Error::BadArgument(format!(
                    "--q {q} disagrees with the certificate's q = {}",
                    cert.q
                )));
            }
        }
        Ok((cert.q, cert.rho, polysign::pattern::sha256_hex(text.as_bytes())))
    } else {
        let q = q_flag.ok_or_else(|| {
            Error::BadArgument("--q is required when --rho is a bare sign string".into())
        })?;
        let line = text
            .lines()
            .next()
            .ok_or_else(|| Error::MalformedFile {
                kind: "rho",
                reason: "empty file".into(),
            })?
            .trim();
        Ok((q, Rho::parse(q, line)?, polysign::pattern::sha256_hex(text.as_bytes())))
    }
}

fn twist_depth() -> u32 {
    8
}

fn run(cli: Cli, argv: &[String]) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Enumerate { d, k, out, budget } => {
            let mut mf = RunManifest::new("enumerate", argv);
            mf.threads = cli.threads;
            let opts = EnumOptions { budget };
            let outcome = enumerate_patterns(d, k, &opts)?;
            let mut rp = Report::new();
            if let Some(path) = &out {
                mf.output(path);
            }
            mf.emit(&mut rp);
            rp.push("d", d);
            rp.push("k", k);
            rp.push("budget", budget);
            rp.push("predicted", polysign::enumerate::predicted_work(d, k));
            rp.push("count", outcome.set.count());
            rp.push("vertices", outcome.vertices);
            rp.push("emitted", outcome.emitted);
            rp.push("pattern_set_digest", outcome.set.digest());
            if let Some(path) = &out {
                outcome.set.save(path)?;
                mf.save_beside(path)?;
            }
            print!("{}", rp.render());
            Ok(PASS)
        }
        Command::Sample {
            d,
            k,
            trials,
            seed,
            out,
        } => {
            let mut mf = RunManifest::new("sample", argv);
            mf.threads = cli.threads;
            mf.seed = Some(seed);
            let set = sample_patterns(d, k, trials, seed)?;
            let mut rp = Report::new();
            if let Some(path) = &out {
                mf.output(path);
            }
            mf.emit(&mut rp);
            rp.push("d", d);
            rp.push("k", k);
            rp.push("trials", trials);
            rp.push("seed", seed);
            rp.push("count", set.count());
            rp.push("pattern_set_digest", set.digest());
            if let Some(path) = &out {
                set.save(path)?;
                mf.save_beside(path)?;
            }
            print!("{}", rp.render());
            Ok(PASS)
        }
        Command::Bound {
            formula,
            d,
            k,
            q,
            m,
            r,
        } => {
            let mut rp = Report::new();
            let mut mf = RunManifest::new("bound", argv);
            mf.threads = cli.threads;
            mf.emit(&mut rp);
            match formula {
                Formula::Mainbound => {
                    let d = need(d, "d", "mainbound")?;
                    let k = need(k, "k", "mainbound")?;
                    let v = bounds::mainbound_exact(d, k)?;
                    rp.push("formula", "mainbound");
                    rp.push("d", d);
                    rp.push("k", k);
                    rp.push("value", &v);
                    rp.push("value_decimal", bounds::decimal_string(&v, 50));
                }
                Formula::C => {
                    let d = need(d, "d", "c")?;
                    let v = bounds::c_constant(d)?;
                    rp.push("formula", "c");
                    rp.push("d", d);
                    rp.push("value", &v);
                    rp.push("value_decimal", bounds::decimal_string(&v, 50));
                }
                Formula::Minq => {
                    let d = need(d, "d", "minq")?;
                    let v = bounds::minimal_q(d)?;
                    rp.push("formula", "minq");
                    rp.push("d", d);
                    rp.push("value", v);
                }
                Formula::Main2 => {
                    let d = need(d, "d", "main2")?;
                    let q = need(q, "q", "main2")?;
                    let v = bounds::main2_threshold(d, q)?;
                    rp.push("formula", "main2");
                    rp.push("d", d);
                    rp.push("q", q);
                    rp.push("value", v);
                }
                Formula::Back1 => {
                    let m = need(m, "m", "back1")?;
                    let r = need(r, "r", "back1")?;
                    let v = bounds::pattern_count_lower_bound(m, r)?;
                    rp.push("formula", "back1");
                    rp.push("m", m);
                    rp.push("r", r);
                    rp.push("value", &v);
                    rp.push("value_decimal", bounds::decimal_string(&v, 50));
                }
                Formula::ChowlaClosed => {
                    let d = need(d, "d", "chowla-closed")?;
                    let v = bounds::chowla_closed_form(d)?;
                    rp.push("formula", "chowla-closed");
                    rp.push("d", d);
                    rp.push("value", &v);
                    rp.push("value_decimal", bounds::decimal_string(&v, 50));
                }
                Formula::ChowlaCorr => {
                    let d = need(d, "d", "chowla-corr")?;
                    let v = bounds::chowla_correlation_exact(d)?;
                    rp.push("formula", "chowla-corr");
                    rp.push("d", d);
                    rp.push("value", &v);
                    rp.push("value_decimal", bounds::decimal_string(&v, 50));
                }
                Formula::Shelah => {
                    let d = need(d, "d", "shelah")?;
                    let m = need(m, "m", "shelah")?;
                    let v = bounds::vertex_cell_bound(m as u32, d)?;
                    rp.push("formula", "shelah");
                    rp.push("m", m);
                    rp.push("d", d);
                    rp.push("value", v);
                }
            }
            print!("{}", rp.render());
            Ok(PASS)
        }
        Command::Correlate {
            d,
            shifts,
            n,
            seed,
            q,
            rho,
            csv,
        } => {
            let mut mf = RunManifest::new("correlate", argv);
            mf.threads = cli.threads;
            mf.seed = Some(seed);
            if let Some(path) = &csv {
                mf.output(path);
            }
            let config = match &rho {
                None => ModelConfig::untwisted(d, MultiplicativeFn::liouville(), 1)?,
                Some(path) => {
                    let (q, rho, digest) = load_rho(q, path)?;
                    mf.input_digest("rho", &digest);
                    ModelConfig::twisted(
                        d,
                        MultiplicativeFn::liouville(),
                        q,
                        rho,
                        1,
                        twist_depth(),
                    )?
                }
            };
            let digest = config.digest();
            let model = Model::new(config)?;
            let est = model.correlation_mc(&shifts, n, seed)?;
            let mut rp = Report::new();
            mf.emit(&mut rp);
            rp.push("d", d);
            rp.push(
                "shifts",
                shifts
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            rp.push("n", n);
            rp.push("seed", seed);
            rp.push("estimate", fmt_f64(est.estimate));
            rp.push("std_error", fmt_f64(est.std_error));
            rp.push("sum", est.sum);
            rp.push("config_digest", &digest);
            if let Some(path) = &csv {
                let shift_list = shifts
                    .iter()
                    .map(|s| s.to_string())
                    .collect::<Vec<_>>()
                    .join("|");
                let row = format!(
                    "subcommand,d,shifts,n,seed,estimate,std_error,config_digest\ncorrelate,{d},{shift_list},{n},{seed},{},{},{digest}\n",
                    fmt_f64(est.estimate),
                    fmt_f64(est.std_error),
                );
                std::fs::write(path, row)?;
                mf.save_beside(path)?;
            }
            print!("{}", rp.render());
            Ok(PASS)
        }
        Command::Gowers {
            d,
            order,
            h,
            n,
            seed,
            hmod,
            xmod,
            csv,
        } => {
            let mut mf = RunManifest::new("gowers", argv);
            mf.threads = cli.threads;
            mf.seed = Some(seed);
            if let Some(path) = &csv {
                mf.output(path);
            }
            let mut hcongs: Vec<Option<Congruence>> = hmod
                .iter()
                .map(|t| parse_congruence(t).map(Some))
                .collect::<Result<_, _>>()?;
            if hcongs.len() == 1 && order > 1 {
                hcongs = vec![hcongs[0]; order as usize];
            }
            let xcong = xmod.as_deref().map(parse_congruence).transpose()?;
            let mut config = ModelConfig::untwisted(d, MultiplicativeFn::liouville(), 1)?;
            if let Some(c) = xcong {
                config.zhat_modulus = c.modulus.max(1) as u128;
            }
            let digest = config.digest();
            let model = Model::new(config)?;
            let est = model.gowers_mc(order, h, n, seed, &hcongs, xcong)?;
            let mut rp = Report::new();
            mf.emit(&mut rp);
            rp.push("d", d);
            rp.push("order", order);
            rp.push("H", h);
            rp.push("n", n);
            rp.push("seed", seed);
            if !hmod.is_empty() {
                rp.push("hmod", hmod.join(" "));
            }
            if let Some(x) = &xmod {
                rp.push("xmod", x);
            }
            rp.push("estimate", fmt_f64(est.estimate));
            rp.push("std_error", fmt_f64(est.std_error));
            rp.push("sum", est.sum);
            rp.push("config_digest", &digest);
            if let Some(path) = &csv {
                let row = format!(
                    "subcommand,d,order,H,n,seed,estimate,std_error,config_digest\ngowers,{d},{order},{h},{n},{seed},{},{},{digest}\n",
                    fmt_f64(est.estimate),
                    fmt_f64(est.std_error),
                );
                std::fs::write(path, row)?;
                mf.save_beside(path)?;
            }
            print!("{}", rp.render());
            Ok(PASS)
        }
        Command::Pushforward {
            d,
            a,
            bins,
            n,
            seed,
            q,
            rho,
        } => {
            let mut mf = RunManifest::new("pushforward", argv);
            mf.threads = cli.threads;
            mf.seed = Some(seed);
            let config = match &rho {
                None => ModelConfig::untwisted(d, MultiplicativeFn::liouville(), a.max(1))?,
                Some(path) => {
                    let (q, rho, digest) = load_rho(q, path)?;
                    mf.input_digest("rho", &digest);
                    ModelConfig::twisted(
                        d,
                        MultiplicativeFn::liouville(),
                        q,
                        rho,
                        a.max(1),
                        twist_depth(),
                    )?
                }
            };
            let digest = config.digest();
            let model = Model::new(config)?;
            let rep = model.pushforward_test(a, bins, n, seed)?;
            let mut rp = Report::new();
            mf.emit(&mut rp);
            rp.push("d", d);
            rp.push("a", a);
            rp.push("bins", rep.bins);
            rp.push("n", rep.n);
            rp.push("seed", seed);
            rp.push("chi_square", fmt_f64(rep.statistic));
            rp.push("dof", rep.dof);
            rp.push("crit95", fmt_f64(rep.crit95));
            rp.push("crit99", fmt_f64(rep.crit99));
            if let Some(t) = rep.t_statistic {
                rp.push("t_chi_square", fmt_f64(t));
                rp.push("t_dof", rep.t_dof);
            }
            rp.push("diagnostic", rep.diagnostic);
            rp.push("config_digest", digest);
            print!("{}", rp.render());
            Ok(PASS)
        }
        Command::Axioms {
            d,
            samples,
            amax,
            seed,
            q,
            rho,
        } => {
            let mut mf = RunManifest::new("axioms", argv);
            mf.threads = cli.threads;
            mf.seed = Some(seed);
            let config = match &rho {
                None => ModelConfig::untwisted(d, MultiplicativeFn::liouville(), amax)?,
                Some(path) => {
                    let (q, rho, digest) = load_rho(q, path)?;
                    mf.input_digest("rho", &digest);
                    ModelConfig::twisted(
                        d,
                        MultiplicativeFn::liouville(),
                        q,
                        rho,
                        amax,
                        twist_depth(),
                    )?
                }
            };
            let digest = config.digest();
            let model = Model::new(config)?;
            let rep = model.axiom_check(samples, amax, seed)?;
            let mut rp = Report::new();
            mf.emit(&mut rp);
            rp.push("d", d);
            rp.push("samples", samples);
            rp.push("amax", amax);
            rp.push("seed", seed);
            rp.push("checks", rep.checks);
            rp.push("violations", rep.violation_count);
            for v in &rep.violations {
                rp.push(
                    "violation",
                    format!(
                        "sample={} identity={} a={} b={} {}",
                        v.sample, v.identity, v.a, v.b, v.detail
                    ),
                );
            }
            rp.push("config_digest", digest);
            rp.push(
                "verdict",
                if rep.violation_count == 0 {
                    "pass"
                } else {
                    "fail"
                },
            );
            print!("{}", rp.render());
            Ok(if rep.violation_count == 0 {
                PASS
            } else {
                check_failed()
            })
        }
        Command::RhoSearch {
            d,
            q,
            epsilon,
            patterns,
            cert,
        } => {
            let mut mf = RunManifest::new("rho-search", argv);
            mf.threads = cli.threads;
            let eps = SignPattern::parse(&epsilon)?;
            let set = PatternSet::load(&patterns)?;
            mf.input_file("patterns", &patterns)?;
            let (found, bad_count) = search_certificate(d, q, &eps, &set)?;
            let mut rp = Report::new();
            if let (Some(path), Some(_)) = (&cert, &found) {
                mf.output(path);
            }
            mf.emit(&mut rp);
            rp.push("d", d);
            rp.push("q", q);
            rp.push("epsilon", eps);
            rp.push("pattern_count", set.count());
            rp.push("determined_triples", set.count() * polysign::multiplicative::euler_phi(q as u64) * q as u64);
            rp.push("bad_count", bad_count);
            rp.push("rho_space", 1u64 << polysign::multiplicative::euler_phi(q as u64));
            rp.push(
                "counting_certificate",
                bounds::counting_certificate(d, q as u64, set.count()),
            );
            match &found {
                None => {
                    rp.push("rho", "none");
                    print!("{}", rp.render());
                    Ok(check_failed())
                }
                Some(c) => {
                    rp.push("rho", c.rho.to_sign_string());
                    rp.push("verified", c.verified);
                    if let Some(path) = &cert {
                        c.save(path)?;
                        mf.save_beside(path)?;
                    }
                    print!("{}", rp.render());
                    Ok(if c.verified { PASS } else { check_failed() })
                }
            }
        }
        Command::RhoVerify { cert, patterns } => {
            let mut mf = RunManifest::new("rho-verify", argv);
            mf.threads = cli.threads;
            let c = ExclusionCertificate::load(&cert)?;
            let set = PatternSet::load(&patterns)?;
            mf.input_file("certificate", &cert)?;
            mf.input_file("patterns", &patterns)?;
            let digest_ok = set.digest() == c.pattern_set_digest;
            let excluded = verify_exclusion(c.d, c.q, &c.epsilon, &c.rho, &set)?;
            let mut rp = Report::new();
            mf.emit(&mut rp);
            rp.push("d", c.d);
            rp.push("q", c.q);
            rp.push("epsilon", c.epsilon);
            rp.push("rho", c.rho.to_sign_string());
            rp.push("digest_match", digest_ok);
            rp.push("exclusion_holds", excluded);
            let ok = digest_ok && excluded && c.verified;
            rp.push("verdict", if ok { "pass" } else { "fail" });
            print!("{}", rp.render());
            Ok(if ok { PASS } else { check_failed() })
        }
        Command::Props {
            check,
            d,
            r,
            mrange,
        } => {
            let mut mf = RunManifest::new("props", argv);
            mf.threads = cli.threads;
            let mut rp = Report::new();
            mf.emit(&mut rp);
            rp.push("d", d);
            rp.push("r", r);
            let opts = EnumOptions::default();
            let pass = match check {
                PropCheck::Back2 => {
                    let k = 2 * r + 2;
                    let set = enumerate_patterns(d, k, &opts)?.set;
                    let rep = props::check_all_patterns_appear(&set, r)?;
                    rp.push("check", "back2");
                    rp.push("k", rep.k);
                    rp.push("count", rep.count);
                    rp.push("expected", rep.expected);
                    if let Some(w) = &rep.witness {
                        rp.push("missing_pattern", w);
                    }
                    rep.pass
                }
                PropCheck::Back1 => {
                    let range = match &mrange {
                        None => 1..=10,
                        Some(t) => parse_mrange(t)?,
                    };
                    let rep = props::check_count_lower_bound(d, r, range, &opts)?;
                    rp.push("check", "back1");
                    for e in &rep.entries {
                        rp.push(
                            &format!("m{}", e.m),
                            format!(
                                "count={} bound={} pass={}",
                                e.count,
                                bounds::decimal_string(&e.bound, 6),
                                e.pass
                            ),
                        );
                    }
                    rep.pass
                }
            };
            rp.push("verdict", if pass { "pass" } else { "fail" });
            print!("{}", rp.render());
            Ok(if pass { PASS } else { check_failed() })
        }
    }
}

