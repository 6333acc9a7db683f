use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use planar_wl::canon::{certificate, isomorphic_planar};
use planar_wl::decompose::{
    block_from_triple, is_block_separator, log_block_decomposition, tutte_blocks,
    validate_decomposition, RootedDecomposition,
};
use planar_wl::experiment::{experiment_iterations, rows_to_csv};
use planar_wl::families::{generate, Family, FamilySpec, Generated};
use planar_wl::graph::{is_triconnected, parse_graph, serialize_graph, Format};
use planar_wl::oracle::{brute_force_isomorphic, enumerate_induced_cycles, naive_colour_refinement};
use planar_wl::planar::{faces, identify_vertices, planar_embed, whitney_is_facial, Embedding};
use planar_wl::wl::{stable_round, wl_joint, wl_run, WlConfig};
use planar_wl::{Error, Graph};

#[derive(Parser)]
#[command(name = "planar-wl", version, about = "Weisfeiler-Leman and decomposition tools for planar graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Common {
    /// Graph encoding for input and output.
    #[arg(long, default_value = "edge-list", value_parser = parse_format, global = true)]
    format: Format,
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct WlArgs {
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 10_000)]
    max_rounds: usize,
    /// Largest admissible number of k-tuples.
    #[arg(long, default_value_t = 1 << 27)]
    cap_tuples: u128,
}

impl WlArgs {
    fn config(&self) -> WlConfig {
        WlConfig {
            max_rounds: self.max_rounds,
            cap_tuples: self.cap_tuples,
            ..WlConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a graph from a family.
    Gen {
        family: Family,
        #[arg(long)]
        n: usize,
        /// Grid columns (defaults to n).
        #[arg(long)]
        cols: Option<usize>,
        /// Edge keep probability for planar-random.
        #[arg(long, default_value_t = 0.5)]
        keep: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Which member of a generated pair to print.
        #[arg(long, default_value_t = 0)]
        member: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Run k-WL to stability and print the stable round and histograms.
    WlRun {
        graph: PathBuf,
        #[command(flatten)]
        wl: WlArgs,
        /// Also dump tuple colours of this round.
        #[arg(long)]
        dump_round: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Report the first round at which k-WL tells two graphs apart.
    WlDistinguish {
        left: PathBuf,
        right: PathBuf,
        #[command(flatten)]
        wl: WlArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Print the log-height block decomposition.
    Decompose {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Check a decomposition file against a graph.
    Validate {
        graph: PathBuf,
        decomposition: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// List blocks, or resolve the block of a vertex triple.
    Blocks {
        graph: PathBuf,
        /// Resolve the block determined by three vertices.
        #[arg(long, num_args = 3, value_names = ["B1", "B2", "B3"])]
        triple: Option<Vec<usize>>,
        /// Test whether one or two vertices form a block separator.
        #[arg(long, num_args = 1..=2, value_names = ["S1", "S2"])]
        separator: Option<Vec<usize>>,
        #[command(flatten)]
        common: Common,
    },
    /// Print a rotation system, or a Kuratowski witness.
    Embed {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print the facial walks of the computed embedding.
    Faces {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Direction strings of all vertices from the anchor edge v1 v2.
    IdentifyVertices {
        graph: PathBuf,
        v1: usize,
        v2: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Print the canonical certificate in hex.
    Canon {
        graph: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Decide isomorphism of two planar graphs.
    Iso {
        left: PathBuf,
        right: PathBuf,
        /// Also compare with 2-WL and 3-WL and log any disagreement.
        #[arg(long)]
        cross_check: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Iteration-count experiment; prints CSV.
    Experiment {
        #[arg(long, value_delimiter = ',', required = true)]
        family: Vec<Family>,
        #[arg(long, value_delimiter = ',', required = true)]
        sizes: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        max_rounds: usize,
        #[arg(long, default_value_t = 1 << 27)]
        cap_tuples: u128,
        /// Fill the wall_time_ms column.
        #[arg(long)]
        timing: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Cross-check the fast algorithms against the brute-force oracles.
    Verify {
        graph: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        common: Common,
    },
}

fn parse_format(s: &str) -> Result<Format, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn read_graph(path: &Path, format: Format) -> anyhow::Result<Graph> {
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s)?;
        s
    } else {
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?
    };
    Ok(parse_graph(&text, format)?)
}

fn emit(common: &Common, text: &str) -> anyhow::Result<()> {
    match &common.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// A report whose failure should end the process with status 2.
struct Failed;

impl std::fmt::Display for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("check failed")
    }
}

impl std::fmt::Debug for Failed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str("Failed")
    }
}

impl std::error::Error for Failed {}

fn run(cli: Cli) -> anyhow::Result<()> {
    match cli.command {
        Command::Gen {
            family,
            n,
            cols,
            keep,
            seed,
            member,
            common,
        } => {
            let spec = FamilySpec {
                family,
                n,
                cols: cols.unwrap_or(n),
                keep,
                seed,
            };
            let g = match (generate(&spec)?, member) {
                (Generated::Single(g), 0) => g,
                (Generated::Pair(a, _), 0) => a,
                (Generated::Pair(_, b), 1) => b,
                _ => bail!(Error::Precondition(format!("no member {member} for family {family}"))),
            };
            emit(&common, &serialize_graph(&g, common.format))
        }
        Command::WlRun {
            graph,
            wl,
            dump_round,
            common,
        } => {
            let g = read_graph(&graph, common.format)?;
            let trace = wl_run(&g, wl.k, &wl.config())?;
            let mut out = match stable_round(&trace) {
                Ok(r) => format!("stable_round {r}\n"),
                Err(e) => {
                    eprintln!("{e}");
                    emit(&common, &trace.histogram_csv())?;
                    return Err(Failed.into());
                }
            };
            out.push_str(&trace.histogram_csv());
            if let Some(r) = dump_round {
                out.push_str(&trace.tuple_dump(r)?);
            }
            emit(&common, &out)
        }
        Command::WlDistinguish {
            left,
            right,
            wl,
            common,
        } => {
            let g = read_graph(&left, common.format)?;
            let h = read_graph(&right, common.format)?;
            let run = wl_joint(&g, &h, wl.k, &wl.config())?;
            let text = match run.distinguishing_round {
                Some(r) => format!("distinguished at round {r}\n"),
                None => match run.joint_stable_index {
                    Some(s) => format!("not distinguished (stable at round {s})\n"),
                    None => format!("not distinguished within {} rounds\n", wl.max_rounds),
                },
            };
            emit(&common, &text)
        }
        Command::Decompose { graph, common } => {
            let g = read_graph(&graph, common.format)?;
            emit(&common, &log_block_decomposition(&g)?.to_text())
        }
        Command::Validate {
            graph,
            decomposition,
            common,
        } => {
            let g = read_graph(&graph, common.format)?;
            let text = fs::read_to_string(&decomposition)
                .with_context(|| format!("reading {}", decomposition.display()))?;
            let d = RootedDecomposition::parse(&text)?;
            let report = validate_decomposition(&g, &d);
            emit(&common, &report.to_text())?;
            if report.passed() {
                Ok(())
            } else {
                Err(Failed.into())
            }
        }
        Command::Blocks {
            graph,
            triple,
            separator,
            common,
        } => {
            let g = read_graph(&graph, common.format)?;
            let in_range = |v: &usize| *v < g.n();
            let mut out = String::new();
            if let Some(t) = &triple {
                if !t.iter().all(in_range) {
                    bail!(Error::Precondition("triple vertex out of range".into()));
                }
                let r = block_from_triple(&g, t[0], t[1], t[2]);
                out.push_str(format!("{} {}", r.kind, join(&r.members)).trim_end());
                out.push('\n');
            }
            if let Some(s) = &separator {
                if !s.iter().all(in_range) {
                    bail!(Error::Precondition("separator vertex out of range".into()));
                }
                let s2 = *s.last().unwrap();
                out.push_str(&format!("{}\n", is_block_separator(&g, s[0], s2)));
            }
            if triple.is_none() && separator.is_none() {
                if !g.is_connected() {
                    bail!(Error::Precondition("blocks need a connected graph".into()));
                }
                for (b, kind) in tutte_blocks(&g) {
                    out.push_str(&format!("{kind} {}\n", join(&b)));
                }
            }
            emit(&common, &out)
        }
        Command::Embed { graph, common } => {
            let g = read_graph(&graph, common.format)?;
            match planar_embed(&g)? {
                Embedding::Planar(rs) => emit(&common, &rs.to_text()),
                Embedding::NonPlanar(w) => {
                    let edges: Vec<String> = w.edges.iter().map(|(a, b)| format!("{a}-{b}")).collect();
                    let text = format!(
                        "nonplanar {}\nbranch {}\nedges {}\n",
                        w.kind,
                        join(&w.branch_vertices),
                        edges.join(",")
                    );
                    emit(&common, &text)?;
                    Err(Failed.into())
                }
            }
        }
        Command::Faces { graph, common } => {
            let g = read_graph(&graph, common.format)?;
            let rs = planar_wl::planar::embed_or_error(&g)?;
            let text: String = faces(&g, &rs)?.iter().map(|f| format!("face {}\n", join(f))).collect();
            emit(&common, &text)
        }
        Command::IdentifyVertices {
            graph,
            v1,
            v2,
            common,
        } => {
            let g = read_graph(&graph, common.format)?;
            if v1 >= g.n() || v2 >= g.n() {
                bail!(Error::Precondition("anchor vertex out of range".into()));
            }
            let map = identify_vertices(&g, v1, v2)?;
            let a = map.anchor;
            emit(&common, &format!("anchor {},{},{}\n{}", a.0, a.1, a.2, map.to_text()))
        }
        Command::Canon { graph, common } => {
            let g = read_graph(&graph, common.format)?;
            emit(&common, &format!("{}\n", certificate(&g)?))
        }
        Command::Iso {
            left,
            right,
            cross_check,
            common,
        } => {
            let g = read_graph(&left, common.format)?;
            let h = read_graph(&right, common.format)?;
            let (cg, ch) = (certificate(&g)?, certificate(&h)?);
            let iso = cg == ch;
            let mut out = format!("{iso}\n{cg}\n{ch}\n");
            if cross_check {
                for k in [2, 3] {
                    match wl_joint(&g, &h, k, &WlConfig::default()) {
                        Ok(run) => {
                            let same = run.distinguishing_round.is_none();
                            out.push_str(&format!("wl k={k}: {}\n", if same { "same" } else { "different" }));
                            if same != iso {
                                eprintln!("disagreement: certificates say {iso}, {k}-WL says {same}");
                            }
                        }
                        Err(e) => out.push_str(&format!("wl k={k}: skipped ({e})\n")),
                    }
                }
            }
            emit(&common, &out)
        }
        Command::Experiment {
            family,
            sizes,
            k,
            seed,
            max_rounds,
            cap_tuples,
            timing,
            common,
        } => {
            let specs: Vec<FamilySpec> = family
                .iter()
                .flat_map(|&f| sizes.iter().map(move |&n| FamilySpec::new(f, n, seed)))
                .collect();
            let cfg = WlConfig {
                max_rounds,
                cap_tuples,
                ..WlConfig::default()
            };
            let rows = experiment_iterations(&specs, k, &cfg, timing)?;
            emit(&common, &rows_to_csv(&rows))
        }
        Command::Verify { graph, seed, common } => {
            let g = read_graph(&graph, common.format)?;
            let (text, ok) = verify(&g, seed)?;
            emit(&common, &text)?;
            if ok {
                Ok(())
            } else {
                Err(Failed.into())
            }
        }
    }
}

/// Oracle cross-checks that apply to `g`; one `PASS`/`FAIL`/`SKIP` line each.
fn verify(g: &Graph, seed: u64) -> anyhow::Result<(String, bool)> {
    let mut out = String::new();
    let mut ok = true;
    let mut line = |name: &str, pass: Option<bool>| {
        match pass {
            Some(true) => out.push_str(&format!("PASS {name}\n")),
            Some(false) => {
                ok = false;
                out.push_str(&format!("FAIL {name}\n"));
            }
            None => out.push_str(&format!("SKIP {name}\n")),
        }
    };

    let trace = wl_run(g, 1, &WlConfig::default())?;
    let mut wl_classes = trace.final_vertex_partition();
    wl_classes.sort();
    let mut naive = naive_colour_refinement(g);
    naive.sort();
    line("colour-refinement", Some(wl_classes == naive));

    let planar = g.n() > 0 && planar_wl::graph::connected_components(g).iter().all(|c| {
        matches!(planar_embed(&g.induced(c)), Ok(Embedding::Planar(_)))
    });
    if planar && g.n() <= 12 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p: Vec<usize> = (0..g.n()).collect();
        p.shuffle(&mut rng);
        let h = g.permute(&p);
        let same = isomorphic_planar(g, &h)? && brute_force_isomorphic(g, &h, 12)?.is_some();
        line("certificate-relabeling", Some(same));
    } else {
        line("certificate-relabeling", None);
    }

    if g.n() > 0 && g.is_connected() {
        let d = log_block_decomposition(g)?;
        line("decomposition", Some(validate_decomposition(g, &d).passed()));
    } else {
        line("decomposition", None);
    }

    if planar && g.n() <= 12 && is_triconnected(g) {
        let rs = planar_wl::planar::embed_or_error(g)?;
        let mut facial: Vec<Vec<usize>> = faces(g, &rs)?.into_iter().map(canonical_cycle).collect();
        facial.sort();
        let mut whitney = Vec::new();
        for c in enumerate_induced_cycles(g) {
            if whitney_is_facial(g, &c)? {
                whitney.push(canonical_cycle(c));
            }
        }
        whitney.sort();
        line("whitney", Some(facial == whitney));
    } else {
        line("whitney", None);
    }
    Ok((out, ok))
}

fn canonical_cycle(mut c: Vec<usize>) -> Vec<usize> {
    let i = (0..c.len()).min_by_key(|&i| c[i]).unwrap_or(0);
    c.rotate_left(i);
    if c.len() > 2 && c[c.len() - 1] < c[1] {
        c[1..].reverse();
    }
    c
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Failed>().is_some() {
        return 2;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::ResourceCap { .. }) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            if e.downcast_ref::<Failed>().is_none() {
                eprintln!("error: {e:#}");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}
