use std::ffi::OsString;
use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kcpp_core::{
    build_balanced_extension, exact_max_cycle_packing, greedy_cycle_packing, kernelize, oracle_kcpp, oracle_solution,
    solve_cpp, solve_kcpp, verify_packing_equivalence, verify_solution, KernelConstants, KernelOutcome, KernelReport,
    Multiplicities, OracleGate, Route, Shortcut, Solution, SolveOptions, Walk,
};

use crate::format::{
    parse_directed, parse_instance, write_directed, write_expansion, write_instance, write_solution,
    DirectedInstance, Instance,
};
use crate::gen;

/// Exit status for a valid instance whose optimum exceeds the budget.
pub const EXIT_NO: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "kcpp", version, about = "Exact k-Chinese Postman solving and kernelization")]
struct Cli {
    /// Write the main result here instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Input {
    /// Instance file; stdin when omitted or `-`.
    input: Option<PathBuf>,
    /// Overrides the k given in the header.
    #[arg(long)]
    k: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct Constants {
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    c1: Option<f64>,
    #[arg(long)]
    c2: Option<f64>,
}

impl Constants {
    fn resolve(&self) -> anyhow::Result<KernelConstants> {
        let d = KernelConstants::default();
        let c1 = self.c1.unwrap_or(d.c1);
        let c2 = self.c2.unwrap_or_else(|| KernelConstants::min_c2(c1));
        Ok(KernelConstants::new(self.c.unwrap_or(d.c), c1, c2)?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve k-CPP exactly through the kernel pipeline.
    Solve {
        #[command(flatten)]
        input: Input,
        /// Decision budget; overrides the header.
        #[arg(long)]
        p: Option<u64>,
        #[command(flatten)]
        constants: Constants,
        /// Search node budget for the exact kernel solver.
        #[arg(long, default_value_t = kcpp_core::kcpp::DEFAULT_SEARCH_BUDGET)]
        budget: u64,
    },
    /// Solve the plain Chinese Postman Problem (one closed walk).
    Cpp {
        #[command(flatten)]
        input: Input,
    },
    /// Run the kernel pipeline and emit a solution or a kernel instance.
    Kernelize {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        constants: Constants,
        /// Expansion sidecar path; defaults to `<output>.x`, or stderr.
        #[arg(long)]
        expansion: Option<PathBuf>,
    },
    /// Pack edge-disjoint cycles of the input graph, one walk per cycle.
    PackCycles {
        #[command(flatten)]
        input: Input,
        /// Exact maximum packing instead of greedy.
        #[arg(long)]
        exact: bool,
        /// Pack in an optimal CPP multigraph instead of the graph itself.
        #[arg(long)]
        cpp: bool,
        /// Edge-copy limit of the exact search.
        #[arg(long, default_value_t = kcpp_core::DEFAULT_PACKING_LIMIT)]
        limit: usize,
    },
    /// Brute-force k-CPP optimum for small instances.
    Oracle {
        #[command(flatten)]
        input: Input,
        /// Largest multiplicity tried per edge; default 2k+2.
        #[arg(long)]
        cap: Option<u32>,
        #[arg(long, default_value_t = 8)]
        max_edges: usize,
        #[arg(long, default_value_t = 3)]
        max_k: usize,
    },
    /// Balance a digraph through an extra vertex and check packing numbers.
    Gadget {
        /// Directed instance file; stdin when omitted or `-`.
        input: Option<PathBuf>,
        #[arg(long, default_value_t = kcpp_core::directed::DEFAULT_GADGET_WEIGHT)]
        gadget_weight: u64,
        /// Arc limit of the brute-force packing; 0 skips the check.
        #[arg(long, default_value_t = 64)]
        limit: usize,
    },
    /// Generate an instance.
    Gen {
        kind: GenKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        arcs: Option<usize>,
        #[arg(long, default_value_t = 3)]
        max_weight: u64,
        /// Named base graph for chain inflation; random when omitted.
        #[arg(long)]
        base: Option<String>,
        #[arg(long, default_value_t = 3)]
        chain: usize,
        #[arg(long, default_value_t = 3)]
        paths: usize,
        #[arg(long, default_value_t = 2)]
        len: usize,
    },
}

#[derive(ValueEnum, Debug, Clone, Copy)]
enum GenKind {
    ChainInflated,
    RandomConnected,
    Theta,
    DirectedRandom,
}

struct Io<'a> {
    stdin: &'a mut dyn Read,
    stdout: &'a mut dyn Write,
    stderr: &'a mut dyn Write,
    output: Option<PathBuf>,
}

impl Io<'_> {
    fn read(&mut self, path: Option<&Path>) -> anyhow::Result<String> {
        match path {
            Some(p) if p != Path::new("-") => fs::read_to_string(p).with_context(|| format!("reading {}", p.display())),
            _ => {
                let mut s = String::new();
                self.stdin.read_to_string(&mut s).context("reading stdin")?;
                Ok(s)
            }
        }
    }

    fn emit(&mut self, text: &str) -> anyhow::Result<()> {
        match &self.output {
            Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
            None => self.stdout.write_all(text.as_bytes()).context("writing stdout"),
        }
    }

    fn report(&mut self, line: impl AsRef<str>) -> anyhow::Result<()> {
        writeln!(self.stderr, "{}", line.as_ref()).context("writing stderr")
    }
}

fn load(io: &mut Io<'_>, input: &Input) -> anyhow::Result<Instance> {
    let text = io.read(input.input.as_deref())?;
    let mut inst = parse_instance(&text)?;
    if let Some(k) = input.k {
        if k == 0 {
            bail!("k must be at least 1");
        }
        inst.k = k;
        if !inst.graph.weights_fit(k) {
            bail!("edge weights may overflow 64 bits for k = {k}");
        }
    }
    Ok(inst)
}

fn shortcut_name(s: Shortcut) -> &'static str {
    match s {
        Shortcut::Pendant => "pendant",
        Shortcut::Packing => "packing",
        Shortcut::ParallelPaths => "parallel-paths",
    }
}

fn report_kernel(io: &mut Io<'_>, r: &KernelReport) -> anyhow::Result<()> {
    io.report(format!(
        "kernel v1={} v2={} v3plus={} h_vertices={} h_edges={} max_parallel={} max_chain={} bypasses={} blocked={}",
        r.v1, r.v2, r.v3plus, r.h_vertices, r.h_edges, r.max_parallel, r.max_chain_internal, r.bypasses, r.blocked_chains
    ))?;
    io.report(format!(
        "bounds v1<{:.3} v3plus<{:.3} h_vertices<={:.3} h_edges<={:.3} exceeds_vertex_bound={} exceeds_edge_bound={}",
        r.v1_threshold,
        r.v3plus_threshold,
        r.h_vertex_threshold,
        r.h_edge_threshold,
        r.exceeds_vertex_bound as u8,
        r.exceeds_edge_bound as u8
    ))
}

fn checked(g: &kcpp_core::MultiGraph, k: usize, s: &Solution) -> anyhow::Result<()> {
    verify_solution(g, k, s).context("internal error: produced solution does not verify")?;
    Ok(())
}

fn execute(cli: Cli, io: &mut Io<'_>) -> anyhow::Result<i32> {
    match cli.command {
        Command::Solve { input, p, constants, budget } => {
            let inst = load(io, &input)?;
            let opts = SolveOptions { constants: constants.resolve()?, budget };
            let p = p.or(inst.budget);
            let out = solve_kcpp(&inst.graph, inst.k, p, &opts)?;
            checked(&inst.graph, inst.k, &out.solution)?;
            io.emit(&write_solution(&out.solution, inst.k))?;
            let route = match out.route {
                Route::Shortcut(s) => shortcut_name(s),
                Route::KernelSearch => "kernel-search",
            };
            let weight = out.solution.total_weight;
            io.report(format!("weight={weight} cpp_weight={} route={route}", out.cpp_weight))?;
            report_kernel(io, &out.report)?;
            match (out.verdict, p) {
                (Some(false), Some(p)) => {
                    io.report(format!("optimum {weight} > budget {p}"))?;
                    Ok(EXIT_NO)
                }
                (Some(true), Some(p)) => {
                    io.report(format!("optimum {weight} <= budget {p}"))?;
                    Ok(0)
                }
                _ => Ok(0),
            }
        }
        Command::Cpp { input } => {
            let inst = load(io, &input)?;
            let cpp = solve_cpp(&inst.graph)?;
            let start = inst.graph.edges()[0].u;
            let tour = kcpp_core::euler_tour(&cpp.multiplicities, start)?;
            let s = Solution { walks: vec![tour], total_weight: cpp.weight };
            checked(&inst.graph, 1, &s)?;
            io.emit(&write_solution(&s, 1))?;
            let join: Vec<String> = cpp.join.edges.iter().map(|e| e.0.to_string()).collect();
            io.report(format!("weight={} join_weight={} join={}", cpp.weight, cpp.join.weight, join.join(",")))?;
            Ok(0)
        }
        Command::Kernelize { input, constants, expansion } => {
            let inst = load(io, &input)?;
            let kz = kernelize(&inst.graph, inst.k, &constants.resolve()?)?;
            match kz.outcome {
                KernelOutcome::Solved { solution, via } => {
                    checked(&inst.graph, inst.k, &solution)?;
                    io.emit(&write_solution(&solution, inst.k))?;
                    io.report(format!("outcome=solved via={} weight={}", shortcut_name(via), solution.total_weight))?;
                }
                KernelOutcome::Reduced(r) => {
                    let kernel = Instance { graph: r.graph, k: r.k, budget: inst.budget };
                    io.emit(&write_instance(&kernel))?;
                    let sidecar = write_expansion(&r.expansion);
                    let target = expansion.or_else(|| {
                        io.output.as_ref().map(|p| {
                            let mut s = p.clone().into_os_string();
                            s.push(".x");
                            PathBuf::from(s)
                        })
                    });
                    match target {
                        Some(path) => fs::write(&path, sidecar).with_context(|| format!("writing {}", path.display()))?,
                        None => io.stderr.write_all(sidecar.as_bytes())?,
                    }
                    io.report(format!(
                        "outcome=reduced vertices={} edges={} k={}",
                        kernel.graph.vertex_count(),
                        kernel.graph.edge_count(),
                        kernel.k
                    ))?;
                }
            }
            report_kernel(io, &kz.report)?;
            Ok(0)
        }
        Command::PackCycles { input, exact, cpp, limit } => {
            let inst = load(io, &input)?;
            let g = &inst.graph;
            let m = if cpp { solve_cpp(g)?.multiplicities } else { Multiplicities::uniform(g, 1) };
            let packing = if exact {
                exact_max_cycle_packing(&m, limit)?.1
            } else {
                greedy_cycle_packing(&m, input.k.unwrap_or(usize::MAX))
            };
            let walks: Vec<Walk> = packing.cycles.iter().map(|c| c.to_walk()).collect();
            let total = packing.cycles.iter().map(|c| c.weight(g)).sum();
            io.emit(&write_solution(&Solution { walks, total_weight: total }, packing.len()))?;
            io.report(format!("cycles={} exact={}", packing.len(), exact as u8))?;
            Ok(0)
        }
        Command::Oracle { input, cap, max_edges, max_k } => {
            let inst = load(io, &input)?;
            let r = oracle_kcpp(&inst.graph, inst.k, cap, OracleGate { max_edges, max_k })?;
            let s = oracle_solution(&inst.graph, &r)?;
            checked(&inst.graph, inst.k, &s)?;
            io.emit(&write_solution(&s, inst.k))?;
            let counts: Vec<String> = r.counts.iter().map(u32::to_string).collect();
            io.report(format!("weight={} counts={}", r.weight, counts.join(",")))?;
            Ok(0)
        }
        Command::Gadget { input, gadget_weight, limit } => {
            let text = io.read(input.as_deref())?;
            let inst = parse_directed(&text)?;
            let g = build_balanced_extension(&inst.digraph, gadget_weight);
            io.emit(&write_directed(&DirectedInstance { digraph: g.d_prime, k: inst.k }))?;
            let x = g.x.map_or_else(|| "none".to_string(), |x| (x + 1).to_string());
            io.report(format!("x={x} midpoints={}", g.midpoints.len()))?;
            if limit > 0 {
                let r = verify_packing_equivalence(&inst.digraph, limit)?;
                io.report(format!("g r={} r'={} dx={} holds={}", r.r, r.r_prime, r.x_outdegree, r.holds as u8))?;
            }
            Ok(0)
        }
        Command::Gen { kind, seed, k, n, m, arcs, max_weight, base, chain, paths, len } => {
            let mut rng = gen::rng(seed);
            let graph = match kind {
                GenKind::ChainInflated => {
                    let b = match &base {
                        Some(name) => gen::named(name).with_context(|| format!("unknown base graph `{name}`"))?,
                        None => {
                            let n = n.unwrap_or(4);
                            random_graph(&mut rng, n, m.unwrap_or(n + 1), max_weight)?
                        }
                    };
                    if chain == 0 {
                        bail!("--chain must be at least 1");
                    }
                    gen::chain_inflated(&b, chain)
                }
                GenKind::RandomConnected => {
                    let n = n.unwrap_or(6);
                    random_graph(&mut rng, n, m.unwrap_or(n + 2), max_weight)?
                }
                GenKind::Theta => {
                    if paths == 0 || len == 0 {
                        bail!("--paths and --len must be at least 1");
                    }
                    gen::theta(paths, len, 1)
                }
                GenKind::DirectedRandom => {
                    let n = n.unwrap_or(5);
                    if n < 2 {
                        bail!("--n must be at least 2");
                    }
                    let d = gen::directed_random(&mut rng, n, arcs.or(m).unwrap_or(8), max_weight);
                    io.emit(&write_directed(&DirectedInstance { digraph: d, k }))?;
                    return Ok(0);
                }
            };
            if k == 0 {
                bail!("--k must be at least 1");
            }
            io.emit(&write_instance(&Instance { graph, k, budget: None }))?;
            Ok(0)
        }
    }
}

fn random_graph(rng: &mut impl rand::Rng, n: usize, m: usize, max_weight: u64) -> anyhow::Result<kcpp_core::MultiGraph> {
    if n < 2 || m + 1 < n {
        bail!("need --n >= 2 and --m >= n - 1");
    }
    Ok(gen::random_connected(rng, n, m, max_weight))
}

/// Runs the command line and returns the process exit code: 0 on success,
/// 2 when the optimum exceeds the decision budget, 1 on any error.
pub fn run<I, T>(args: I, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = write!(stderr, "{}", e.render());
            return 1;
        }
        Err(e) => {
            let _ = write!(stdout, "{}", e.render());
            return 0;
        }
    };
    let output = cli.output.clone();
    let mut io = Io { stdin, stdout, stderr, output };
    match execute(cli, &mut io) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io.stderr, "error: {e:#}");
            1
        }
    }
}
