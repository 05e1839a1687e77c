//! The four workflows behind the `qsd` binary.

use std::fmt::Write as _;

use qsd_core::certify::{
    certify, certify_counts, mdi_probe_cells, CertificationReport, MdiProbeResult,
};
use qsd_core::discriminate::{discriminate, DecisionOptions, Ensemble, P2Table};
use qsd_core::guessing::{sweep_grid, SweepGrid};
use qsd_core::netsim::{p1_exact, sample, CountsTable, DeviceStrategy, NQubitNetwork};
use qsd_core::qcore::{PauliLabel, TAU_NUM};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{parse_ensemble, Command, RunConfig};
use crate::error::{CliError, ExitStatus};
use crate::output::{emit, records, report};

/// Bound on the largest guessing gap that the sweep summary is checked against.
pub const SWEEP_REPORTED_BOUND: f64 = 0.146;

/// ChaCha stream reserved for drawing which member is prepared in each trial.
const TRUTH_STREAM: u64 = u64::MAX;

pub fn run(config: &RunConfig) -> Result<ExitStatus, CliError> {
    let hash = config.hash();
    match config.command {
        Command::Certify => run_certify(config, &hash),
        Command::Discriminate => run_discriminate(config, &hash),
        Command::Sweep => run_sweep(config, &hash),
        Command::Demo => run_demo(config),
    }
}

/// Certification of one cell; sampled data uses `seed`.
fn certify_cell(
    strategy: &DeviceStrategy,
    config: &RunConfig,
    seed: u64,
) -> Result<(CertificationReport, Option<CountsTable>), CliError> {
    let exact = p1_exact(strategy)?;
    Ok(match config.shots.count() {
        None => (certify(&exact, config.tolerance.unwrap_or(TAU_NUM))?, None),
        Some(n) => {
            let counts = sample(&exact, n, seed)?;
            (certify_counts(&counts, config.tolerance)?, Some(counts))
        }
    })
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

fn run_certify(config: &RunConfig, hash: &str) -> Result<ExitStatus, CliError> {
    let strategy = config.strategy.build()?;
    let (r, counts) = certify_cell(&strategy, config, config.seed)?;
    let mut pairs = vec![
        ("strategy", strategy.label().to_string()),
        ("beta", r.beta.to_string()),
    ];
    let names = ["gamma0", "gamma1", "gamma2", "gamma3"];
    pairs.extend(names.iter().zip(r.gamma).map(|(k, g)| (*k, opt(g))));
    pairs.extend([
        ("tolerance", r.tolerance.to_string()),
        ("passed", r.passed.to_string()),
        ("shots", config.shots.to_string()),
        ("shots_used", opt(r.shots_used)),
        ("seed", config.seed.to_string()),
        ("config_hash", hash.to_string()),
    ]);
    emit(config.output.as_deref(), &report(&pairs, config.format)?)?;
    if let (Some(path), Some(counts)) = (&config.counts_output, &counts) {
        emit(Some(path), &counts_csv(counts, config.seed, hash)?)?;
    }
    Ok(if r.passed {
        ExitStatus::Success
    } else {
        ExitStatus::CertificationFailed
    })
}

/// Counts as CSV: one input and one outcome column per party, then the count.
fn counts_csv(counts: &CountsTable, seed: u64, hash: &str) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let names: Vec<&str> = counts
        .layout()
        .parties()
        .iter()
        .map(|p| p.name.as_str())
        .collect();
    let mut header: Vec<String> = names.iter().map(|n| format!("input_{n}")).collect();
    header.extend(names.iter().map(|n| format!("outcome_{n}")));
    header.extend(["count", "seed", "config_hash"].map(String::from));
    w.write_record(&header)?;
    for rec in counts.records() {
        let mut row: Vec<String> = rec.inputs.iter().map(|i| i.to_string()).collect();
        row.extend(rec.outcomes.iter().map(|o| o.to_string()));
        row.extend([rec.count.to_string(), seed.to_string(), hash.to_string()]);
        w.write_record(&row)?;
    }
    w.into_inner()
        .map_err(|e| CliError::Internal(e.to_string()))
}

fn tuple_label(tuple: &[PauliLabel]) -> String {
    tuple.iter().map(|l| l.index().to_string()).collect()
}

#[derive(Serialize)]
struct TrialRecord {
    trial: u64,
    true_index: usize,
    chosen_index: Option<usize>,
    correct: bool,
    status: &'static str,
    mode: Option<String>,
    margin: Option<f64>,
    required_margin: Option<f64>,
    /// Deciding index tuples, one digit per system, separated by `;`.
    used_inputs: String,
    beta_min: f64,
    probe_signs: String,
    seed: u64,
    config_hash: String,
}

/// Everything one trial produced, before it is turned into a record.
struct Trial {
    certs: Vec<CertificationReport>,
    probes: Option<Result<Vec<MdiProbeResult>, qsd_core::Error>>,
    decision: qsd_core::Result<qsd_core::discriminate::DiscriminationDecision>,
}

fn status_of(e: &qsd_core::Error) -> Option<(&'static str, ExitStatus)> {
    use qsd_core::Error as E;
    match e {
        E::Uncertified => Some(("uncertified", ExitStatus::CertificationFailed)),
        E::MdiRequired => Some(("mdi-required", ExitStatus::Refused)),
        E::Inconclusive { .. } => Some(("inconclusive", ExitStatus::Refused)),
        E::InconclusiveProbe { .. } => Some(("inconclusive-probe", ExitStatus::Refused)),
        _ => None,
    }
}

/// Seeds of trial `t` on an `n`-cell network: certification of cell `k` uses
/// `base + k`, the discrimination round `base + n`, probes `base + n + 1 + k`.
fn trial_base_seed(seed: u64, t: u64, n: usize) -> u64 {
    seed.wrapping_add(t.wrapping_mul(2 * n as u64 + 1))
}

struct Session {
    network: NQubitNetwork,
    ensemble: Ensemble,
    /// Exact discrimination-round tables, one per member.
    tables: Vec<qsd_core::correlations::CorrelationTable>,
}

impl Session {
    fn new(config: &RunConfig, ensemble: Ensemble) -> Result<Self, CliError> {
        let strategy = config.strategy.build()?;
        let network = NQubitNetwork::new(vec![strategy; ensemble.n_qubits()])?;
        let tables = ensemble
            .states()
            .map(|s| network.p2_exact(s))
            .collect::<qsd_core::Result<_>>()?;
        Ok(Self {
            network,
            ensemble,
            tables,
        })
    }

    fn trial(
        &self,
        config: &RunConfig,
        truth: usize,
        base: u64,
        probe: bool,
    ) -> Result<Trial, CliError> {
        let n = self.network.n_cells();
        let certs = self
            .network
            .cells()
            .iter()
            .enumerate()
            .map(|(k, s)| certify_cell(s, config, base.wrapping_add(k as u64)).map(|c| c.0))
            .collect::<Result<Vec<_>, _>>()?;
        let probes = probe.then(|| {
            mdi_probe_cells(
                &self.network,
                config.shots.count(),
                base.wrapping_add(n as u64 + 1),
            )
        });
        let observed = match config.shots.count() {
            None => P2Table::from_table(&self.tables[truth])?,
            Some(shots) => P2Table::from_counts(&sample(
                &self.tables[truth],
                shots,
                base.wrapping_add(n as u64),
            )?)?,
        };
        let decision = match &probes {
            Some(Err(e)) => Err(e.clone()),
            Some(Ok(p)) => discriminate(
                &observed,
                &self.ensemble,
                &certs,
                Some(p),
                &DecisionOptions::default(),
            ),
            None => discriminate(
                &observed,
                &self.ensemble,
                &certs,
                None,
                &DecisionOptions::default(),
            ),
        };
        Ok(Trial {
            certs,
            probes,
            decision,
        })
    }
}

fn run_discriminate(config: &RunConfig, hash: &str) -> Result<ExitStatus, CliError> {
    let ensemble = parse_ensemble(&config.ensemble)?;
    let priors = WeightedIndex::new(ensemble.priors().collect::<Vec<_>>())
        .map_err(|e| CliError::config("ensemble", e.to_string()))?;
    let session = Session::new(config, ensemble)?;
    let n = session.network.n_cells();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(TRUTH_STREAM);

    let mut rows = Vec::with_capacity(config.trials as usize);
    let mut status = ExitStatus::Success;
    for t in 0..config.trials {
        let truth = priors.sample(&mut rng);
        let trial = session.trial(
            config,
            truth,
            trial_base_seed(config.seed, t, n),
            config.mdi_probe,
        )?;
        let beta_min = trial
            .certs
            .iter()
            .map(|c| c.beta)
            .fold(f64::INFINITY, f64::min);
        let probe_signs = match &trial.probes {
            Some(Ok(p)) => p
                .iter()
                .map(|r| r.sign.to_string())
                .collect::<Vec<_>>()
                .join(";"),
            _ => String::new(),
        };
        let mut row = TrialRecord {
            trial: t,
            true_index: truth,
            chosen_index: None,
            correct: false,
            status: "ok",
            mode: None,
            margin: None,
            required_margin: None,
            used_inputs: String::new(),
            beta_min,
            probe_signs,
            seed: config.seed,
            config_hash: hash.to_string(),
        };
        match trial.decision {
            Ok(d) => {
                row.chosen_index = Some(d.chosen_index);
                row.correct = d.chosen_index == truth;
                row.mode = Some(d.mode.to_string());
                row.margin = Some(d.margin);
                row.required_margin = Some(d.required_margin);
                row.used_inputs = d
                    .used_inputs
                    .iter()
                    .map(|u| tuple_label(u))
                    .collect::<Vec<_>>()
                    .join(";");
            }
            Err(e) => match status_of(&e) {
                Some((label, s)) => {
                    row.status = label;
                    status = status.max(s);
                }
                None => return Err(e.into()),
            },
        }
        rows.push(row);
    }
    emit(config.output.as_deref(), &records(&rows, config.format)?)?;
    let decided = rows.iter().filter(|r| r.chosen_index.is_some()).count();
    let correct = rows.iter().filter(|r| r.correct).count();
    eprintln!(
        "accuracy: {correct} correct of {decided} decided, {} refused, {} trials",
        rows.len() - decided,
        rows.len()
    );
    Ok(status)
}

#[derive(Serialize)]
struct HeatmapRow {
    q: f64,
    c1: f64,
    d_sign1: i8,
    c2: f64,
    d_sign2: i8,
    p_g1: f64,
    p_g2: f64,
    p_delta: f64,
    seed: u64,
    config_hash: String,
}

#[derive(Serialize)]
struct PriorRow {
    q: f64,
    avg_p_delta: f64,
    max_p_delta: f64,
    argmax_c1: f64,
    argmax_d_sign1: i8,
    argmax_c2: f64,
    argmax_d_sign2: i8,
    seed: u64,
    config_hash: String,
}

fn run_sweep(config: &RunConfig, hash: &str) -> Result<ExitStatus, CliError> {
    let grid = SweepGrid {
        q_step: config.grid_step,
        c_step: config.grid_step,
        both_signs: true,
    };
    let result = sweep_grid(&grid)?;
    let heatmap: Vec<HeatmapRow> = result
        .heatmap
        .iter()
        .map(|h| HeatmapRow {
            q: 0.5,
            c1: h.psi1.c,
            d_sign1: h.psi1.d_sign,
            c2: h.psi2.c,
            d_sign2: h.psi2.d_sign,
            p_g1: h.p_g1,
            p_g2: h.p_g2,
            p_delta: h.p_delta,
            seed: config.seed,
            config_hash: hash.to_string(),
        })
        .collect();
    emit(config.output.as_deref(), &records(&heatmap, config.format)?)?;
    if let Some(path) = &config.per_q_output {
        let per_q: Vec<PriorRow> = result
            .per_q
            .iter()
            .map(|s| PriorRow {
                q: s.q,
                avg_p_delta: s.avg,
                max_p_delta: s.max,
                argmax_c1: s.argmax.0.c,
                argmax_d_sign1: s.argmax.0.d_sign,
                argmax_c2: s.argmax.1.c,
                argmax_d_sign2: s.argmax.1.d_sign,
                seed: config.seed,
                config_hash: hash.to_string(),
            })
            .collect();
        emit(Some(path), &records(&per_q, config.format)?)?;
    }
    eprintln!(
        "sweep: global max p_delta = {} at q = {}; max average = {} at q = {}; global max < {}: {}",
        result.global_max,
        result.global_max_q,
        result.max_of_avg,
        result.max_of_avg_q,
        SWEEP_REPORTED_BOUND,
        result.global_max < SWEEP_REPORTED_BOUND
    );
    Ok(ExitStatus::Success)
}

/// End-to-end run on every ensemble member in turn, as a readable transcript.
fn run_demo(config: &RunConfig) -> Result<ExitStatus, CliError> {
    let mut out = String::new();
    let strategy = config.strategy.build()?;
    let ensemble = parse_ensemble(&config.ensemble)?;
    let _ = writeln!(
        out,
        "devices: {}, shots: {}, seed: {}",
        strategy.label(),
        config.shots,
        config.seed
    );
    let _ = writeln!(out, "ensemble: {}", config.ensemble.join(", "));

    let _ = writeln!(out, "\nstep 1: certification");
    let (r, _) = certify_cell(&strategy, config, config.seed)?;
    let _ = writeln!(out, "  beta = {:.6} (maximum 8.485281)", r.beta);
    for (b, g) in r.gamma.iter().enumerate() {
        let _ = writeln!(out, "  gamma{b} = {}", opt(g.map(|g| format!("{g:.6}"))));
    }
    let _ = writeln!(
        out,
        "  tolerance = {:.3e}, passed = {}",
        r.tolerance, r.passed
    );
    if !r.passed {
        let _ = writeln!(out, "\nrefused: devices are not certified");
        emit(config.output.as_deref(), out.as_bytes())?;
        return Ok(ExitStatus::CertificationFailed);
    }

    let session = Session::new(config, ensemble)?;
    let n = session.network.n_cells();
    let _ = writeln!(out, "\nstep 2: third-axis probe on |R>");
    let probe = mdi_probe_cells(
        &session.network,
        config.shots.count(),
        trial_base_seed(config.seed, 0, n).wrapping_add(n as u64 + 1),
    );
    match &probe {
        Ok(p) => {
            for (k, r) in p.iter().enumerate() {
                let _ = writeln!(
                    out,
                    "  cell {k}: P(+1|3) = {:.6}, sign = {:+}",
                    r.probe_outcome_distribution[0], r.sign
                );
            }
        }
        Err(e) => {
            let _ = writeln!(out, "  {e}");
        }
    }

    let _ = writeln!(out, "\nstep 3: discrimination");
    let mut status = ExitStatus::Success;
    for (truth, name) in config.ensemble.iter().enumerate() {
        let base = trial_base_seed(config.seed, truth as u64, n);
        let trial = session.trial(config, truth, base, true)?;
        let line = match trial.decision {
            Ok(d) => format!(
                "chose {} ({}), mode {}, margin {:.6}, inputs {}",
                d.chosen_index,
                if d.chosen_index == truth {
                    "correct"
                } else {
                    "wrong"
                },
                d.mode,
                d.margin,
                d.used_inputs
                    .iter()
                    .map(|u| tuple_label(u))
                    .collect::<Vec<_>>()
                    .join(";")
            ),
            Err(e) => {
                let (_, s) = status_of(&e).ok_or_else(|| CliError::from(e.clone()))?;
                status = status.max(s);
                format!("refused: {e}")
            }
        };
        let _ = writeln!(out, "  prepared {truth} [{name}]: {line}");
    }
    emit(config.output.as_deref(), out.as_bytes())?;
    Ok(status)
}
