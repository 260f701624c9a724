//! `ashg gen`: reduction generators and random instances.
//!
//! Every generator writes the instance with `c v <id> <role>` comment lines
//! ahead of the header. A witness partition is written only when a valid
//! certificate of the source problem is supplied.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Subcommand};
use hedonic_core::format::{
    parse_dimacs, parse_integers, parse_partition, write_instance_with_comments, write_partition,
};
use hedonic_core::random::{random_instance, random_path, RandomSpec};
use hedonic_core::reductions::{
    gen_bin_packing, gen_sat_bounded_degree, gen_sat_high_degree, gen_three_partition_star, square_zero_arcs,
    witness_bin_packing, witness_sat_bounded_degree, witness_sat_high_degree, witness_square, witness_three_partition,
    BinPacking, CnfFormula, Literal, ThreePartition,
};
use hedonic_core::{is_nash_stable, AshgInstance, Partition, Weight};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::{Answer, RunReport, EXIT_SOME};
use crate::{emit, load_instance, read};

#[derive(Args)]
pub struct Output {
    /// Instance output file; stdout if absent.
    #[arg(short, long)]
    out: Option<PathBuf>,
    /// Source-problem certificate used to build the witness.
    #[arg(long, requires = "witness")]
    certificate: Option<PathBuf>,
    /// Witness partition output file; needs `--certificate`.
    #[arg(long, requires = "certificate")]
    witness: Option<PathBuf>,
}

#[derive(Subcommand)]
pub enum GenCommand {
    /// 3-SAT with degree O(Δ) and weights up to 4^Δ. Certificate: one signed
    /// DIMACS literal per variable.
    #[command(name = "sat-hd")]
    SatHd {
        /// DIMACS CNF file.
        #[arg(long)]
        cnf: PathBuf,
        /// Degree parameter, at least 2; rounded up to a power of two.
        #[arg(long)]
        delta: usize,
        #[command(flatten)]
        output: Output,
    },
    /// 3-SAT with constant degree and weights in {-2,-1,1,2}. Certificate as
    /// for `sat-hd`.
    #[command(name = "sat-bd")]
    SatBd {
        #[arg(long)]
        cnf: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// 3-Partition on a star. Certificate: 1-based item ids, three per bin.
    #[command(name = "3part")]
    ThreePart {
        /// Whitespace-separated item sizes.
        #[arg(long)]
        items: PathBuf,
        #[arg(long)]
        target: u64,
        /// Add the target to every item and quadruple the target first.
        #[arg(long)]
        normalize: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Bin Packing with a size-k vertex cover. Certificate: the 1-based bin
    /// of every item.
    Binpack {
        #[arg(long)]
        items: PathBuf,
        #[arg(long)]
        capacity: u64,
        #[arg(long)]
        bins: usize,
        /// Replace every arc by unit-weight paths.
        #[arg(long)]
        unit_weights: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Add zero-weight arcs between vertices at distance two. Certificate: a
    /// Nash stable partition of the input.
    Square {
        instance: PathBuf,
        #[command(flatten)]
        output: Output,
    },
    /// Seeded random instance with bounded degree.
    Random {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        min_weight: Weight,
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        max_weight: Weight,
        #[arg(long, default_value_t = 0.5)]
        edge_probability: f64,
        #[arg(long, default_value_t = 0.7)]
        mutual_probability: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Generate a path with random weights on both arcs of every edge.
        #[arg(long)]
        path: bool,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn integers(path: &Path) -> Result<Vec<i64>> {
    parse_integers(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_cnf(path: &Path) -> Result<CnfFormula> {
    parse_dimacs(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// Signed literals, each variable exactly once.
fn assignment(phi: &CnfFormula, path: &Path) -> Result<Vec<bool>> {
    let mut value = vec![None; phi.num_vars()];
    for code in integers(path)? {
        let lit = Literal::from_dimacs(code).with_context(|| format!("`{code}` is not a literal"))?;
        let slot = value.get_mut(lit.var).with_context(|| format!("variable {} out of range", lit.var + 1))?;
        if slot.replace(lit.positive).is_some() {
            bail!("variable {} assigned twice", lit.var + 1);
        }
    }
    value.iter().enumerate().map(|(k, v)| v.with_context(|| format!("variable {} unassigned", k + 1))).collect()
}

/// 1-based positive ids, shifted to 0-based.
fn indices(path: &Path, limit: usize, what: &str) -> Result<Vec<usize>> {
    integers(path)?
        .into_iter()
        .map(|x| match usize::try_from(x) {
            Ok(i) if (1..=limit).contains(&i) => Ok(i - 1),
            _ => bail!("{what} {x} outside 1..={limit}"),
        })
        .collect()
}

fn roles<T: std::fmt::Display>(labels: impl IntoIterator<Item = T>) -> Vec<String> {
    labels.into_iter().enumerate().map(|(v, r)| format!("v {} {r}", v + 1)).collect()
}

fn finish(
    command: &str,
    output: &Output,
    instance: &AshgInstance,
    comments: &[String],
    witness: Option<Partition>,
    started: Instant,
) -> Result<u8> {
    if let (Some(path), Some(w)) = (&output.witness, &witness) {
        emit(Some(path), &write_partition(w))?;
    }
    emit(output.out.as_deref(), &write_instance_with_comments(instance, comments))?;
    RunReport::new(command, instance, started).answer(Answer::Some).emit();
    Ok(EXIT_SOME)
}

pub fn run(cmd: &GenCommand) -> Result<u8> {
    let started = Instant::now();
    match cmd {
        GenCommand::SatHd { cnf, delta, output } => {
            let phi = load_cnf(cnf)?;
            let red = gen_sat_high_degree(&phi, *delta)?;
            let mut comments = vec![format!("sat-hd delta {} palette block {}", red.delta, red.palette_block)];
            comments.extend(
                red.encoding
                    .iter()
                    .enumerate()
                    .map(|(k, s)| format!("x {} selection u({},{},*) bit {}", k + 1, s.i1, s.i2, s.i3)),
            );
            comments.extend(roles(&red.roles));
            let witness = match &output.certificate {
                Some(c) => Some(witness_sat_high_degree(&phi, *delta, &assignment(&phi, c)?)?),
                None => None,
            };
            finish("gen sat-hd", output, &red.instance, &comments, witness, started)
        }
        GenCommand::SatBd { cnf, output } => {
            let phi = load_cnf(cnf)?;
            let red = gen_sat_bounded_degree(&phi)?;
            let mut comments = vec![format!(
                "sat-bd padded vars {} palette paths {} selection paths {} length {}",
                red.padded_vars, red.palette_paths, red.selection_paths, red.path_length
            )];
            comments.extend(
                red.encoding
                    .iter()
                    .enumerate()
                    .map(|(k, s)| format!("x {} selection path {} bit {}", k + 1, s.path, s.bit)),
            );
            comments.extend(roles(&red.roles));
            let witness = match &output.certificate {
                Some(c) => Some(witness_sat_bounded_degree(&phi, &assignment(&phi, c)?)?),
                None => None,
            };
            finish("gen sat-bd", output, &red.instance, &comments, witness, started)
        }
        GenCommand::ThreePart { items, target, normalize, output } => {
            let sizes = integers(items)?
                .into_iter()
                .map(|x| u64::try_from(x).with_context(|| format!("item {x} is negative")))
                .collect::<Result<Vec<_>>>()?;
            let tp = if *normalize {
                ThreePartition::normalized(sizes, *target)?
            } else {
                ThreePartition::new(sizes, *target)?
            };
            let g = gen_three_partition_star(&tp)?;
            let m = tp.items().len();
            let labels = (0..g.n()).map(|v| match v {
                v if v < m => format!("item {}", tp.items()[v]),
                v if v < m + tp.triples() => "bin".to_string(),
                v if v == m + tp.triples() => "stalker s".to_string(),
                _ => "helper s'".to_string(),
            });
            let mut comments = vec![format!("3part target {}", tp.target())];
            comments.extend(roles(labels));
            let witness = match &output.certificate {
                Some(c) => {
                    let ids = indices(c, m, "item")?;
                    if ids.len() % 3 != 0 {
                        bail!("certificate lists {} items, not a multiple of 3", ids.len());
                    }
                    let triples: Vec<[usize; 3]> = ids.chunks(3).map(|t| [t[0], t[1], t[2]]).collect();
                    Some(witness_three_partition(&tp, &triples)?)
                }
                None => None,
            };
            finish("gen 3part", output, &g, &comments, witness, started)
        }
        GenCommand::Binpack { items, capacity, bins, unit_weights, output } => {
            let sizes = integers(items)?
                .into_iter()
                .map(|x| u64::try_from(x).with_context(|| format!("item {x} is negative")))
                .collect::<Result<Vec<_>>>()?;
            let bp = BinPacking::new(sizes, *capacity, *bins)?;
            let red = gen_bin_packing(&bp, *unit_weights)?;
            let mut label = vec![String::new(); red.instance.n()];
            for (i, &v) in red.bin_vertices.iter().enumerate() {
                label[v] = format!("bin b({})", i + 1);
            }
            for (i, &v) in red.helper_vertices.iter().enumerate() {
                label[v] = format!("helper b'({})", i + 1);
            }
            let original = bp.items().len();
            for (i, (&v, &a)) in red.item_vertices.iter().zip(red.padded.items()).enumerate() {
                label[v] = if i < original { format!("item {a}") } else { "padding 1".to_string() };
            }
            let base = red.instance.n() - red.expansion_heads.len();
            for (t, &h) in red.expansion_heads.iter().enumerate() {
                label[base + t] = format!("expansion toward {}", h + 1);
            }
            let mut comments = vec![format!("binpack capacity {} bins {}", bp.capacity(), bp.bins())];
            comments.extend(roles(label));
            let witness = match &output.certificate {
                Some(c) => Some(witness_bin_packing(&bp, *unit_weights, &indices(c, bp.bins(), "bin")?)?),
                None => None,
            };
            finish("gen binpack", output, &red.instance, &comments, witness, started)
        }
        GenCommand::Square { instance, output } => {
            let g = load_instance(instance)?;
            let sq = square_zero_arcs(&g);
            let witness = match &output.certificate {
                Some(c) => {
                    let p = parse_partition(&read(c)?).with_context(|| format!("in {}", c.display()))?;
                    if !is_nash_stable(&g, &p)? {
                        bail!("certificate is not a Nash stable partition of the input");
                    }
                    Some(witness_square(&g, &p)?)
                }
                None => None,
            };
            finish("gen square", output, &sq, &[], witness, started)
        }
        GenCommand::Random {
            n,
            max_degree,
            min_weight,
            max_weight,
            edge_probability,
            mutual_probability,
            seed,
            path,
            out,
        } => {
            if min_weight > max_weight {
                bail!("--min-weight exceeds --max-weight");
            }
            for p in [edge_probability, mutual_probability] {
                if !(0.0..=1.0).contains(p) {
                    bail!("probability {p} outside [0, 1]");
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let g = if *path {
                random_path(&mut rng, *n, *min_weight, *max_weight)
            } else {
                let spec = RandomSpec {
                    n: *n,
                    max_degree: *max_degree,
                    min_weight: *min_weight,
                    max_weight: *max_weight,
                    edge_probability: *edge_probability,
                    mutual_probability: *mutual_probability,
                };
                random_instance(&mut rng, &spec)
            };
            let comment = format!("random seed {seed}");
            emit(out.as_deref(), &write_instance_with_comments(&g, &[comment]))?;
            RunReport::new("gen random", &g, started).answer(Answer::Some).emit();
            Ok(EXIT_SOME)
        }
    }
}
