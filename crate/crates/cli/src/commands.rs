use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use coreshape::decomp::{hooi, rre, surrogate_loss, tucker_hosvd, CoreShape};
use coreshape::npy::{read_npy, write_npy};
use coreshape::packing::{self, InstanceFile, PackingInstance, Solution, SolutionJson, SolverId};
use coreshape::spectra::{mode_sq_singular_values, ModeSpectra};
use coreshape::synth::gen_synthetic;
use coreshape::tensor::DenseTensor;
use coreshape::treenet::{solve_tree_grid, tree_instance_from_tensor, TreeSolutionJson, TreeTopology};
use rayon::prelude::*;
use serde::{Serialize, Serializer};

use crate::args::{
    BudgetArgs, GenArgs, OutputFormat, ParetoArgs, RreArgs, SingvalsArgs, SolveArgs, SweepArgs,
    TreeArgs,
};
use crate::error::{CliError, Result};
use crate::presets;
use crate::rre_greedy::{rre_greedy, Step};

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn display<S: Serializer>(shape: &CoreShape, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(shape)
}

fn write_json(out: &mut dyn Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut *out, value)?;
    writeln!(out)?;
    Ok(())
}

fn write_csv<T: Serialize>(out: &mut dyn Write, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

fn relative(loss: f64, total: f64) -> f64 {
    if total == 0.0 {
        0.0
    } else {
        loss / total
    }
}

fn hooi_rre(x: &DenseTensor, shape: &CoreShape, iters: usize) -> Result<f64> {
    Ok(rre(x, &hooi(x, shape, iters, None)?)?)
}

/// Budgets from an explicit list or a `START:END:COUNT` geometric spec,
/// strictly ascending.
pub fn budget_list(args: &BudgetArgs) -> Result<Vec<u64>> {
    let budgets = match (&args.budgets, &args.geometric) {
        (Some(list), _) => list.clone(),
        (None, Some(spec)) => {
            let parts: Vec<&str> = spec.split(':').collect();
            let parsed: Option<Vec<u64>> = parts.iter().map(|p| p.trim().parse().ok()).collect();
            match parsed.as_deref() {
                Some(&[start, end, count]) if parts.len() == 3 => {
                    geometric_budgets(start, end, count as usize)?
                }
                _ => {
                    return Err(CliError::Usage(format!(
                        "geometric budgets must look like START:END:COUNT, got {spec:?}"
                    )))
                }
            }
        }
        (None, None) => Vec::new(),
    };
    if budgets.is_empty() {
        return Err(CliError::Usage("the budget list is empty".into()));
    }
    if budgets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(CliError::Usage("budgets must be strictly ascending".into()));
    }
    Ok(budgets)
}

/// `count` budgets from `start` to `end` with a constant ratio, rounded to
/// integers and deduplicated.
pub fn geometric_budgets(start: u64, end: u64, count: usize) -> Result<Vec<u64>> {
    if start == 0 || end < start || count == 0 {
        return Err(CliError::Usage(format!(
            "geometric budgets need 1 ≤ START ≤ END and COUNT ≥ 1, got {start}:{end}:{count}"
        )));
    }
    if count == 1 {
        return Ok(vec![start]);
    }
    let ratio = end as f64 / start as f64;
    let mut out: Vec<u64> = (0..count)
        .map(|k| match k {
            0 => start,
            k if k == count - 1 => end,
            k => (start as f64 * ratio.powf(k as f64 / (count - 1) as f64)).round() as u64,
        })
        .collect();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Serialize)]
struct GenSummary<'a> {
    path: String,
    preset: Option<&'a str>,
    shape: &'a [usize],
    core: &'a [usize],
    noise: f64,
    seed: u64,
    synthetic: bool,
}

pub fn gen(args: &GenArgs, out: &mut dyn Write) -> Result<()> {
    let preset = match &args.preset {
        Some(name) => Some(presets::find(name).ok_or_else(|| {
            CliError::Usage(format!(
                "unknown preset {name:?}; expected one of {}",
                presets::names().join(", ")
            ))
        })?),
        None => None,
    };
    let shape: Vec<usize> = match (&args.shape, preset) {
        (Some(s), _) => s.clone(),
        (None, Some(p)) => p.shape.to_vec(),
        (None, None) => return Err(CliError::Usage("either --shape or --preset is required".into())),
    };
    let core: Vec<usize> = match (&args.core, preset) {
        (Some(c), _) => c.clone(),
        (None, Some(p)) => p.core.to_vec(),
        (None, None) => shape.iter().map(|&d| d.min(4)).collect(),
    };
    let noise = args.noise.or(preset.map(|p| p.noise)).unwrap_or(0.0);
    if shape.is_empty() || shape.contains(&0) {
        return Err(CliError::Usage(format!("invalid shape {shape:?}")));
    }
    let x = gen_synthetic(&shape, &core, noise, args.seed)?;
    write_npy(&x, &args.output)?;
    write_json(
        out,
        &GenSummary {
            path: args.output.display().to_string(),
            preset: preset.map(|p| p.name),
            shape: &shape,
            core: &core,
            noise,
            seed: args.seed,
            synthetic: true,
        },
    )
}

#[derive(Debug, Serialize)]
struct ModeValues<'a> {
    mode: usize,
    sq_singular_values: &'a [f64],
}

pub fn singvals(args: &SingvalsArgs, out: &mut dyn Write) -> Result<()> {
    let x = read_npy(&args.input)?;
    let s = mode_sq_singular_values(&x);
    let rows: Vec<ModeValues> = s
        .sq_singular_values
        .iter()
        .enumerate()
        .map(|(n, v)| ModeValues {
            mode: n + 1,
            sq_singular_values: v,
        })
        .collect();
    write_json(out, &rows)
}

enum Input {
    Tensor(DenseTensor),
    Instance(PackingInstance),
}

fn load_input(path: &Path) -> Result<Input> {
    let is_json = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if is_json {
        let text = std::fs::read_to_string(path).map_err(coreshape::Error::from)?;
        let file: InstanceFile = serde_json::from_str(&text).map_err(coreshape::Error::from)?;
        Ok(Input::Instance(PackingInstance::from_file(file)?))
    } else {
        Ok(Input::Tensor(read_npy(path)?))
    }
}

#[derive(Debug, Serialize)]
pub struct SolveReport {
    #[serde(flatten)]
    pub solution: SolutionJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectra_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rre: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<Vec<Step>>,
}

#[derive(Debug, Serialize)]
struct SolveRow {
    algo: SolverId,
    #[serde(serialize_with = "display")]
    shape: CoreShape,
    objective: f64,
    cost: u64,
    rre: Option<f64>,
    spectra_ms: Option<f64>,
    elapsed_ms: f64,
}

/// Runs `solve` and returns the report that the command prints.
pub fn solve_report(args: &SolveArgs) -> Result<SolveReport> {
    let input = load_input(&args.input)?;
    let (x, spectra_time, inst) = match input {
        Input::Instance(inst) => {
            if args.algo == SolverId::RreGreedy {
                return Err(CliError::Usage("rre-greedy needs a tensor input, not an instance".into()));
            }
            if args.with_rre {
                return Err(CliError::Usage("--with-rre needs a tensor input".into()));
            }
            let inst = match args.budget {
                Some(c) => inst.with_budget(c)?,
                None => inst,
            };
            (None, None, inst)
        }
        Input::Tensor(x) => {
            let budget = args
                .budget
                .ok_or_else(|| CliError::Usage("--budget is required for tensor input".into()))?;
            let start = Instant::now();
            let spectra = mode_sq_singular_values(&x);
            let inst = PackingInstance::from_spectra(&spectra, budget)?;
            (Some(x), Some(start.elapsed()), inst)
        }
    };

    let (mut solution, trajectory, greedy_rre) = if args.algo == SolverId::RreGreedy {
        let x = x.as_ref().expect("checked above");
        let start = Instant::now();
        let g = rre_greedy(x, inst.budget(), args.hooi_iters, x.shape())?;
        let json = SolutionJson {
            shape: g.shape.0.clone(),
            objective: inst.objective(g.shape.ranks())?,
            cost: u64::try_from(inst.cost(g.shape.ranks())).unwrap_or(u64::MAX),
            solver: SolverId::RreGreedy,
            elapsed_ms: ms(start.elapsed()),
        };
        (json, Some(g.trajectory), Some(g.rre))
    } else {
        let s: Solution = packing::solve(&inst, args.algo, args.epsilon)?;
        (s.to_json(), None, None)
    };
    if let Some(t) = spectra_time {
        solution.elapsed_ms += ms(t);
    }

    let rre_value = match (&x, args.with_rre) {
        (Some(x), true) => match greedy_rre {
            Some(v) => Some(v),
            None => Some(hooi_rre(x, &CoreShape(solution.shape.clone()), args.hooi_iters)?),
        },
        _ => None,
    };
    Ok(SolveReport {
        solution,
        spectra_ms: spectra_time.map(ms),
        rre: rre_value,
        trajectory,
    })
}

pub fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<()> {
    let report = solve_report(args)?;
    match args.output {
        OutputFormat::Json => write_json(out, &report),
        OutputFormat::Csv => write_csv(
            out,
            &[SolveRow {
                algo: report.solution.solver,
                shape: CoreShape(report.solution.shape.clone()),
                objective: report.solution.objective,
                cost: report.solution.cost,
                rre: report.rre,
                spectra_ms: report.spectra_ms,
                elapsed_ms: report.solution.elapsed_ms,
            }],
        ),
    }
}

/// One solver run within a sweep.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRecord {
    pub budget: u64,
    pub algo: SolverId,
    #[serde(serialize_with = "display")]
    pub shape: CoreShape,
    pub objective: f64,
    pub surrogate_rre: f64,
    pub hooi_rre: Option<f64>,
    pub spectra_ms: f64,
    pub solve_ms: f64,
}

fn sorted_algos(algos: &[SolverId]) -> Result<Vec<SolverId>> {
    let mut algos = algos.to_vec();
    algos.sort();
    algos.dedup();
    if algos.is_empty() {
        return Err(CliError::Usage("no algorithms given".into()));
    }
    Ok(algos)
}

struct Prepared {
    spectra: ModeSpectra,
    spectra_ms: f64,
    total: f64,
}

fn prepare(x: &DenseTensor) -> Prepared {
    let start = Instant::now();
    let spectra = mode_sq_singular_values(x);
    Prepared {
        spectra_ms: ms(start.elapsed()),
        total: x.fro_norm_sq(),
        spectra,
    }
}

/// Runs one solver for one budget; returns the shape and the solve time.
fn run_one(
    x: &DenseTensor,
    inst: &PackingInstance,
    algo: SolverId,
    eps: f64,
    hooi_iters: usize,
    caps: &[usize],
) -> Result<(CoreShape, Duration, Option<f64>)> {
    let start = Instant::now();
    if algo == SolverId::RreGreedy {
        let g = rre_greedy(x, inst.budget(), hooi_iters, caps)?;
        return Ok((g.shape, start.elapsed(), Some(g.rre)));
    }
    let s = packing::solve(inst, algo, eps)?;
    Ok((s.shape, start.elapsed(), None))
}

/// Solves every (budget, algo) pair, reusing one spectra computation. Rows
/// are ordered by budget, then by algorithm in the fixed solver order.
pub fn sweep_records(
    x: &DenseTensor,
    budgets: &[u64],
    algos: &[SolverId],
    eps: f64,
    with_rre: bool,
    hooi_iters: usize,
) -> Result<Vec<SweepRecord>> {
    let algos = sorted_algos(algos)?;
    let prep = prepare(x);
    let base = PackingInstance::from_spectra(&prep.spectra, budgets[0])?;
    let jobs: Vec<(u64, SolverId)> = budgets
        .iter()
        .flat_map(|&b| algos.iter().map(move |&a| (b, a)))
        .collect();
    jobs.par_iter()
        .map(|&(budget, algo)| {
            let inst = base.with_budget(budget)?;
            let (shape, took, greedy_rre) = run_one(x, &inst, algo, eps, hooi_iters, x.shape())?;
            let hooi_rre = match (with_rre, greedy_rre) {
                (false, _) => None,
                (true, Some(v)) => Some(v),
                (true, None) => Some(hooi_rre(x, &shape, hooi_iters)?),
            };
            Ok(SweepRecord {
                budget,
                algo,
                objective: inst.objective(shape.ranks())?,
                surrogate_rre: relative(surrogate_loss(&prep.spectra, &shape)?, prep.total),
                hooi_rre,
                spectra_ms: prep.spectra_ms,
                solve_ms: ms(took),
                shape,
            })
        })
        .collect()
}

pub fn sweep(args: &SweepArgs, out: &mut dyn Write) -> Result<()> {
    let budgets = budget_list(&args.budgets)?;
    let x = read_npy(&args.input)?;
    let rows = sweep_records(&x, &budgets, &args.algos, args.epsilon, args.with_rre, args.hooi_iters)?;
    match args.output {
        OutputFormat::Csv => write_csv(out, &rows),
        OutputFormat::Json => write_json(out, &rows),
    }
}

/// One point of a compression/error frontier.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParetoPoint {
    pub budget: u64,
    pub algo: SolverId,
    #[serde(serialize_with = "display")]
    pub shape: CoreShape,
    pub size: u64,
    pub compression_rate: f64,
    pub rre: f64,
}

pub fn pareto_points(
    x: &DenseTensor,
    budgets: &[u64],
    algos: &[SolverId],
    max_rank: Option<&[usize]>,
    eps: f64,
    hooi_iters: usize,
) -> Result<Vec<ParetoPoint>> {
    let algos = sorted_algos(algos)?;
    let dims = x.shape();
    let caps: Vec<usize> = match max_rank {
        None => dims.to_vec(),
        Some([c]) => dims.iter().map(|&d| d.min(*c)).collect(),
        Some(list) if list.len() == dims.len() => {
            dims.iter().zip(list).map(|(&d, &c)| d.min(c)).collect()
        }
        Some(list) => {
            return Err(CliError::Usage(format!(
                "--max-rank takes one value or {} values, got {}",
                dims.len(),
                list.len()
            )))
        }
    };
    if caps.contains(&0) {
        return Err(CliError::Usage("--max-rank values must be ≥ 1".into()));
    }
    let prep = prepare(x);
    let base = PackingInstance::from_spectra(&prep.spectra, budgets[0])?.with_rank_caps(&caps)?;
    let numel = dims.iter().map(|&d| d as f64).product::<f64>();
    let jobs: Vec<(u64, SolverId)> = budgets
        .iter()
        .flat_map(|&b| algos.iter().map(move |&a| (b, a)))
        .collect();
    jobs.par_iter()
        .map(|&(budget, algo)| {
            let inst = base.with_budget(budget)?;
            let (shape, _, greedy_rre) = run_one(x, &inst, algo, eps, hooi_iters, &caps)?;
            let rre = match greedy_rre {
                Some(v) => v,
                None => hooi_rre(x, &shape, hooi_iters)?,
            };
            let size = shape.tucker_size(dims);
            Ok(ParetoPoint {
                budget,
                algo,
                size: u64::try_from(size).unwrap_or(u64::MAX),
                compression_rate: size as f64 / numel,
                rre,
                shape,
            })
        })
        .collect()
}

pub fn pareto(args: &ParetoArgs, out: &mut dyn Write) -> Result<()> {
    let budgets = budget_list(&args.budgets)?;
    let x = read_npy(&args.input)?;
    let rows = pareto_points(
        &x,
        &budgets,
        &args.algos,
        args.max_rank.as_deref(),
        args.epsilon,
        args.hooi_iters,
    )?;
    write_csv(out, &rows)
}

#[derive(Debug, Serialize)]
struct RreReport<'a> {
    shape: &'a [usize],
    rre: f64,
    hosvd_rre: f64,
    iters: usize,
}

pub fn rre_cmd(args: &RreArgs, out: &mut dyn Write) -> Result<()> {
    let x = read_npy(&args.input)?;
    let shape = CoreShape(args.shape.clone());
    let hosvd = tucker_hosvd(&x, &shape)?;
    let hosvd_rre = rre(&x, &hosvd)?;
    let refined = hooi(&x, &shape, args.hooi_iters, Some(&hosvd))?;
    write_json(
        out,
        &RreReport {
            shape: &args.shape,
            rre: rre(&x, &refined)?,
            hosvd_rre,
            iters: args.hooi_iters,
        },
    )
}

#[derive(Debug, Serialize)]
struct TreeReport {
    #[serde(flatten)]
    solution: TreeSolutionJson,
    spectra_ms: f64,
}

pub fn tree(args: &TreeArgs, out: &mut dyn Write) -> Result<()> {
    let x = read_npy(&args.input)?;
    let topology = match args.topology.as_str() {
        "depth-one" => TreeTopology::depth_one(x.shape())?,
        "binary" => TreeTopology::balanced_binary(x.shape())?,
        path => {
            let text = std::fs::read_to_string(path).map_err(coreshape::Error::from)?;
            TreeTopology::from_json(&text, x.shape())?
        }
    };
    let start = Instant::now();
    let inst = tree_instance_from_tensor(&x, &topology, args.budget)?;
    let spectra = start.elapsed();
    let mut solution = solve_tree_grid(&inst, args.epsilon)?.to_json(&topology);
    solution.elapsed_ms += ms(spectra);
    write_json(
        out,
        &TreeReport {
            solution,
            spectra_ms: ms(spectra),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometric_endpoints_and_count() {
        let b = geometric_budgets(1000, 100_000, 20).unwrap();
        assert_eq!(b.len(), 20);
        assert_eq!((b[0], b[19]), (1000, 100_000));
        assert!(b.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(geometric_budgets(5, 6, 10).unwrap(), vec![5, 6]);
        assert!(geometric_budgets(0, 6, 3).is_err());
        assert!(geometric_budgets(10, 6, 3).is_err());
    }

    #[test]
    fn budget_list_checks_order() {
        let args = |b: Vec<u64>| BudgetArgs {
            budgets: Some(b),
            geometric: None,
        };
        assert!(budget_list(&args(vec![10, 20])).is_ok());
        assert!(budget_list(&args(vec![20, 10])).is_err());
        assert!(budget_list(&args(vec![])).is_err());
        let bad = BudgetArgs {
            budgets: None,
            geometric: Some("1:2".into()),
        };
        assert!(matches!(budget_list(&bad), Err(CliError::Usage(_))));
    }
}
