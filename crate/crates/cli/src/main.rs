use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use tensorlab_core::harness::{self, Report};
use tensorlab_core::schreier::{self, Limits};
use tensorlab_core::space::format_signs;
use tensorlab_core::tensor::{self, LpBudget};
use tensorlab_core::trees::{self, parse_node};
use tensorlab_core::weights;
use tensorlab_core::{Family, FiniteSet, Ordinal, TGamma, TensorMatrix};

#[derive(Parser)]
#[command(
    name = "tensorlab",
    version,
    about = "Schreier families, repeated averages and tensor norms"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    out: Output,
}

#[derive(Args)]
struct Output {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum, PartialEq)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Membership, maximality and block decompositions.
    #[command(subcommand)]
    Schreier(SchreierCmd),
    /// Repeated-averages weights.
    #[command(subcommand)]
    Weights(WeightsCmd),
    /// The trees T[gamma] and their functions.
    #[command(subcommand)]
    Tree(TreeCmd),
    /// Norms of tensors in l_inf (x) l_inf, read as JSON.
    #[command(subcommand)]
    Tensor(TensorCmd),
    /// Verification suites; the exit code is 0 iff every check passes.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// A family such as `S[2]` or `S[w][S[1]]`; overrides --xi/--zeta.
    #[arg(long)]
    family: Option<String>,
    #[arg(long, default_value = "1")]
    xi: Ordinal,
    /// With --zeta the family is `S[zeta][S[xi]]`.
    #[arg(long)]
    zeta: Option<Ordinal>,
}

impl FamilyArgs {
    fn family(&self) -> Result<Family> {
        if let Some(f) = &self.family {
            return f.parse().map_err(anyhow::Error::from);
        }
        Ok(match &self.zeta {
            Some(z) => Family::conv(z.clone(), self.xi.clone()),
            None => Family::Base(self.xi.clone()),
        })
    }
}

#[derive(Subcommand)]
enum SchreierCmd {
    Member {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        set: FiniteSet,
    },
    Maximal {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        set: FiniteSet,
    },
    /// Split a stream into successive maximal blocks.
    Decompose {
        #[command(flatten)]
        fam: FamilyArgs,
        /// A start `n` for `n, n+1, ...`, or an explicit increasing list.
        #[arg(long, default_value = "3")]
        stream: String,
        #[arg(long, default_value_t = 3)]
        blocks: usize,
    },
    /// Residual rank and canonical representation of a member.
    Rank {
        #[command(flatten)]
        fam: FamilyArgs,
        #[arg(long)]
        set: FiniteSet,
        /// Truncation for the rank in the tree of members below it.
        #[arg(long)]
        trunc: Option<u64>,
    },
}

#[derive(Subcommand)]
enum WeightsCmd {
    P {
        #[arg(long, default_value = "1")]
        xi: Ordinal,
        #[arg(long)]
        set: FiniteSet,
    },
    Q {
        #[arg(long, default_value = "1")]
        xi: Ordinal,
        #[arg(long, default_value = "1")]
        zeta: Ordinal,
        #[arg(long)]
        set: FiniteSet,
    },
    /// Permanence and convexity identities along streams.
    Perm(PermArgs),
}

#[derive(Args)]
struct PermArgs {
    #[arg(long, default_value = "1")]
    xi: Ordinal,
    #[arg(long, default_value = "1")]
    zeta: Ordinal,
    /// Comma separated stream starts.
    #[arg(long, default_value = "3")]
    stream: String,
    #[arg(long, default_value_t = 1)]
    blocks: usize,
}

#[derive(Subcommand)]
enum TreeCmd {
    /// Every node of the truncation with its rank and function.
    Build {
        #[arg(long, default_value = "1")]
        gamma: Ordinal,
        #[arg(long, default_value_t = 3)]
        trunc: u64,
    },
    /// The Cantor scheme along the leftmost maximal branch through a node.
    Scheme {
        #[arg(long, default_value = "1")]
        gamma: Ordinal,
        #[arg(long)]
        node: String,
    },
    /// The tree nodes assigned to the initial segments of a set.
    Phi {
        #[arg(long, default_value = "1")]
        xi: Ordinal,
        #[arg(long, default_value = "1")]
        zeta: Ordinal,
        #[arg(long)]
        set: FiniteSet,
    },
}

#[derive(Subcommand)]
enum TensorCmd {
    /// Projective norm of a matrix given as JSON rows.
    Pi {
        #[arg(long)]
        matrix: String,
    },
    /// Injective norm.
    Eps {
        #[arg(long)]
        matrix: String,
    },
    /// Weak-p norm: vectors for any p, tensors for p = 1 (exact) or 2 (lower bound).
    Weakp {
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        /// JSON array of vectors.
        #[arg(long, conflicts_with = "tensors")]
        vectors: Option<String>,
        /// JSON array of matrices.
        #[arg(long)]
        tensors: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    Perm(PermArgs),
    Sharpness {
        #[arg(long, default_value = "0")]
        xi: Ordinal,
        #[arg(long, default_value = "0")]
        zeta: Ordinal,
        #[arg(long, default_value_t = 3)]
        stream: u64,
    },
    Blocking {
        #[arg(long, default_value = "1")]
        xi: Ordinal,
        #[arg(long, default_value_t = 3)]
        stream: u64,
        #[arg(long, default_value_t = 3)]
        blocks: usize,
        #[arg(long, default_value_t = 0.01)]
        eps: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    Groth {
        #[arg(long, default_value_t = 3)]
        count: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value_t = 11)]
        seed: u64,
    },
    /// Random biorthogonal configurations.
    LowerBound {
        #[arg(long, default_value_t = 12)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        seed: u64,
    },
    All {
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

enum Outcome {
    Value(Value),
    Reports(Vec<Report>),
}

fn stream_of(s: &str) -> Result<Box<dyn Iterator<Item = u64>>> {
    if s.contains(',') {
        let v: Vec<u64> = s
            .split(',')
            .map(|t| t.trim().parse::<u64>())
            .collect::<Result<_, _>>()
            .context("stream entries must be integers")?;
        if v.windows(2).any(|w| w[0] >= w[1]) {
            bail!("stream must be increasing");
        }
        Ok(Box::new(v.into_iter()))
    } else {
        let start: u64 = s.trim().parse().context("stream start must be an integer")?;
        if start == 0 {
            bail!("streams start at 1");
        }
        Ok(Box::new(start..))
    }
}

fn matrix(s: &str) -> Result<TensorMatrix> {
    serde_json::from_str(s).context("expected a JSON array of rows")
}

fn perm_config(a: &PermArgs) -> Result<harness::PermConfig> {
    let starts = a
        .stream
        .split(',')
        .map(|t| t.trim().parse::<u64>())
        .collect::<Result<Vec<_>, _>>()
        .context("stream starts must be integers")?;
    Ok(harness::PermConfig {
        xi: a.xi.clone(),
        zeta: a.zeta.clone(),
        starts,
        blocks: a.blocks,
        limits: Limits::default(),
    })
}

fn run(cmd: Command) -> Result<Outcome> {
    let limits = Limits::default();
    let budget = LpBudget::default();
    let value = match cmd {
        Command::Schreier(c) => match c {
            SchreierCmd::Member { fam, set } => {
                let f = fam.family()?;
                json!({"family": f, "set": set, "member": schreier::member(&f, &set)})
            }
            SchreierCmd::Maximal { fam, set } => {
                let f = fam.family()?;
                json!({"family": f, "set": set, "maximal": schreier::is_maximal(&f, &set)?})
            }
            SchreierCmd::Decompose { fam, stream, blocks } => {
                let f = fam.family()?;
                let bs = schreier::decompose(&f, stream_of(&stream)?, blocks, &limits)?;
                json!({"family": f, "blocks": bs})
            }
            SchreierCmd::Rank { fam, set, trunc } => {
                let f = fam.family()?;
                let rep = schreier::canonical_rep(&f, &set)?;
                let mut v = json!({
                    "family": f,
                    "set": set,
                    "rank": schreier::residual_rank(&f, &set)?,
                    "canonical": rep,
                });
                if let Some(n) = trunc {
                    v["truncated_rank"] = json!(schreier::node_rank(&f, &set, n, &limits)?);
                }
                v
            }
        },
        Command::Weights(c) => match c {
            WeightsCmd::P { xi, set } => {
                json!({"xi": xi, "set": set, "p": weights::p_weight(&xi, &set)?.to_string()})
            }
            WeightsCmd::Q { xi, zeta, set } => {
                let q = weights::q_weight(&xi, &zeta, &set)?;
                json!({"xi": xi, "zeta": zeta, "set": set, "q": q, "q_float": q.to_f64()})
            }
            WeightsCmd::Perm(a) => return Ok(Outcome::Reports(vec![harness::run_perm_suite(&perm_config(&a)?)])),
        },
        Command::Tree(c) => match c {
            TreeCmd::Build { gamma, trunc } => {
                let t = TGamma::new(gamma)?;
                let nodes = trees::describe(&t, trunc, limits.max_nodes)?;
                json!({"tree": t.to_string(), "trunc": trunc, "rank": t.truncated_rank(trunc), "nodes": nodes})
            }
            TreeCmd::Scheme { gamma, node } => {
                let t = TGamma::new(gamma)?;
                let n = parse_node(&node)?;
                let branch = t.leftmost_maximal_extension(&n)?;
                let s = t.cantor_scheme(&branch)?;
                let cells: BTreeMap<String, String> =
                    s.cells().map(|(d, c)| (format_signs(d), c.to_string())).collect();
                json!({"branch": trees::format_node(&branch), "depth": s.depth(), "cells": cells})
            }
            TreeCmd::Phi { xi, zeta, set } => {
                let t = TGamma::new(Ordinal::omega_pow(zeta.clone()))?;
                let chain = trees::phi_chain(&xi, &zeta, &t, &set)?;
                let chain: Vec<String> = chain.iter().map(|n| trees::format_node(n)).collect();
                json!({"xi": xi, "zeta": zeta, "set": set, "chain": chain, "phi": chain.last()})
            }
        },
        Command::Tensor(c) => match c {
            TensorCmd::Pi { matrix: m } => {
                let u = matrix(&m)?;
                let r = tensor::pi_norm_with(&u, &budget)?;
                let pairing = tensor::pair_dual(&u, &r.certificate)?;
                json!({
                    "pi": r.value,
                    "lower": r.lower,
                    "certificate": r.certificate,
                    "pairing": pairing,
                    "iterations": r.iterations,
                })
            }
            TensorCmd::Eps { matrix: m } => json!({"eps": tensor::eps_norm(&matrix(&m)?)}),
            TensorCmd::Weakp {
                p,
                vectors,
                tensors,
                seed,
            } => match (vectors, tensors) {
                (Some(v), None) => {
                    let xs: Vec<Vec<f64>> = serde_json::from_str(&v).context("expected a JSON array of vectors")?;
                    json!({"p": p, "weak": tensor::weak_p_norm_vec(&xs, p)?})
                }
                (None, Some(t)) => {
                    let us: Vec<TensorMatrix> =
                        serde_json::from_str(&t).context("expected a JSON array of matrices")?;
                    if p == 1.0 {
                        json!({"p": 1, "weak": tensor::weak_1_norm_pi(&us, &budget)?, "exact": true})
                    } else if p == 2.0 {
                        json!({"p": 2, "weak": tensor::weak_2_norm_pi_lower(&us, tensor::DEFAULT_RESTARTS, seed, &budget)?, "exact": false})
                    } else {
                        bail!("tensor families support p = 1 or p = 2");
                    }
                }
                _ => bail!("give exactly one of --vectors or --tensors"),
            },
        },
        Command::Verify(c) => {
            let reports = match c {
                VerifyCmd::Perm(a) => vec![harness::run_perm_suite(&perm_config(&a)?)],
                VerifyCmd::Sharpness { xi, zeta, stream } => {
                    vec![harness::run_sharpness(&harness::SharpnessConfig::new(xi, zeta, stream))]
                }
                VerifyCmd::Blocking {
                    xi,
                    stream,
                    blocks,
                    eps,
                    seed,
                } => {
                    vec![harness::run_blocking_demo(&harness::BlockingConfig {
                        xi,
                        start: stream,
                        blocks,
                        eps,
                        seed,
                        ..Default::default()
                    })]
                }
                VerifyCmd::Groth { count, samples, seed } => {
                    if count > 6 {
                        bail!("family size is limited to 6");
                    }
                    vec![harness::run_groth_probe(&harness::GrothConfig {
                        count,
                        samples,
                        seed,
                        ..Default::default()
                    })]
                }
                VerifyCmd::LowerBound { trials, seed } => {
                    vec![harness::run_lower_bound_probe(&harness::LowerBoundConfig {
                        trials,
                        seed,
                    })]
                }
                VerifyCmd::All { seed } => harness::run_all(seed),
            };
            return Ok(Outcome::Reports(reports));
        }
    };
    Ok(Outcome::Value(value))
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            match writeln!(std::io::stdout().lock(), "{text}") {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(e.into()),
                _ => Ok(()),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = run(cli.command).and_then(|o| match o {
        Outcome::Value(v) => {
            if cli.out.format == Format::Csv {
                bail!("csv output is only available for verification reports");
            }
            emit(&cli.out, &serde_json::to_string_pretty(&v)?)?;
            Ok(true)
        }
        Outcome::Reports(rs) => {
            let text = match cli.out.format {
                Format::Csv => harness::csv_rows(&rs)?,
                Format::Json if rs.len() == 1 => rs[0].to_json(),
                Format::Json => serde_json::to_string_pretty(&rs)?,
            };
            emit(&cli.out, &text)?;
            for r in &rs {
                let failed = r.checks.iter().filter(|c| !c.pass).count();
                eprintln!(
                    "{}: {} ({} checks, {} failed)",
                    r.scenario,
                    if r.pass { "PASS" } else { "FAIL" },
                    r.checks.len(),
                    failed
                );
            }
            Ok(rs.iter().all(|r| r.pass))
        }
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
