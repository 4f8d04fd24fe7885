use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use gkpforge::angular::ElectronicChannel;
use gkpforge::barriers::{
    build_budget, qed_correction, AnchorConfig, BarrierError, ScenarioKind, SignalModel,
};
use gkpforge::budget::{chi_band, chi_bound, ramsey_plan, BudgetError, MilestoneLadder};
use gkpforge::gkp::{
    extract, requested_row, topology_table, ElectronicCoefficients, GkpError, ObservationSet,
};
use gkpforge::montecarlo::{
    histogram_csv, kappa_histogram, sample_kappa_values, Execution, McError, SamplingSpec,
};
use gkpforge::nucdata::{self, DataError, IsotopeChain, IsotopeRecord};
use gkpforge::resources;

use crate::manifest::RunManifest;
use crate::output::{sci, sci_opt, Table};
use crate::reports::*;
use crate::{Cli, CliError, Command, Format};

impl From<DataError> for CliError {
    fn from(e: DataError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<BarrierError> for CliError {
    fn from(e: BarrierError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<BudgetError> for CliError {
    fn from(e: BudgetError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<GkpError> for CliError {
    fn from(e: GkpError) -> Self {
        match e {
            GkpError::Underdetermined { .. }
            | GkpError::Singular { .. }
            | GkpError::ZeroColumn { .. }
            | GkpError::NoRank2Transition => CliError::Refused(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<McError> for CliError {
    fn from(e: McError) -> Self {
        match e {
            McError::Gkp(g) => g.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

pub fn run(cli: &Cli) -> Result<String, CliError> {
    match &cli.command {
        Command::Budget {
            anchors,
            scenario,
            probe,
            channel,
        } => budget(cli, anchors.as_deref(), scenario, *probe, channel),
        Command::Solvability {
            transitions,
            nbkg,
            add_isotope,
        } => solvability(cli, *transitions, *nbkg, add_isotope),
        Command::Condition {
            spec,
            coeffs,
            samples,
            positive,
            sequential,
        } => condition(
            cli,
            spec.as_deref(),
            coeffs.as_deref(),
            *samples,
            *positive,
            *sequential,
        ),
        Command::Extract { rhs, coeffs } => extract_cmd(cli, rhs, coeffs.as_deref()),
        Command::Milestones { target, ladder } => milestones(cli, *target, ladder.as_deref()),
        Command::Ramsey {
            half_life,
            tr,
            reps,
        } => ramsey(cli, half_life.as_deref(), tr.as_deref(), *reps),
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))
}

/// Text of an optional user file, else of a bundled resource; recorded in
/// the manifest either way.
fn input_text(m: &mut RunManifest, path: Option<&Path>, bundled: &str) -> Result<String, CliError> {
    let (label, text) = match path {
        Some(p) => (p.display().to_string(), read_file(p)?),
        None => (format!("bundled:{bundled}"), resources::text(bundled)?),
    };
    m.input(label, &text);
    Ok(text)
}

fn load_chain(cli: &Cli, m: &mut RunManifest) -> Result<IsotopeChain, CliError> {
    let text = input_text(m, cli.chain.as_deref(), resources::MO_CHAIN)?;
    let is_json = cli
        .chain
        .as_deref()
        .and_then(nucdata::ChainFormat::from_path)
        .is_some_and(|f| f == nucdata::ChainFormat::Json);
    let chain = if is_json {
        nucdata::chain_from_json_str(&text)?
    } else {
        nucdata::chain_from_csv_str(&text)?
    };
    Ok(chain.validated()?)
}

fn load_coeffs(
    m: &mut RunManifest,
    path: Option<&Path>,
) -> Result<ElectronicCoefficients, CliError> {
    let text = input_text(m, path, resources::MO41_COEFFS)?;
    let c = ElectronicCoefficients::from_json_str(&text).map_err(|e| match path {
        Some(p) => CliError::Validation(format!("{}: {e}", p.display())),
        None => e.into(),
    })?;
    m.version("coefficients", &c.version);
    Ok(c)
}

fn to_json<T: Serialize>(report: &T) -> Result<String, CliError> {
    serde_json::to_string_pretty(report)
        .map(|s| s + "\n")
        .map_err(|e| CliError::Numerical(e.to_string()))
}

fn csv_string(header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 csv")
}

fn write_out(cli: &Cli, files: &[(&str, &str)]) -> Result<(), CliError> {
    let Some(dir) = &cli.out else { return Ok(()) };
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Validation(format!("cannot create {}: {e}", dir.display())))?;
    for (name, contents) in files {
        let path: PathBuf = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

/// Writes `<command>.json` (plus extra files) under `--out` and picks the
/// stdout text for the requested format.
fn emit<T: Serialize>(
    cli: &Cli,
    command: &str,
    report: &T,
    table: String,
    csv: String,
    extra: &[(&str, &str)],
) -> Result<String, CliError> {
    let json = to_json(report)?;
    let name = format!("{command}.json");
    let mut files = vec![(name.as_str(), json.as_str())];
    files.extend_from_slice(extra);
    write_out(cli, &files)?;
    Ok(match cli.format {
        Format::Table => table,
        Format::Json => json,
        Format::Csv => csv,
    })
}

fn budget(
    cli: &Cli,
    anchors: Option<&Path>,
    scenario: &str,
    probe: u32,
    channel: &str,
) -> Result<String, CliError> {
    let mut m = RunManifest::new("budget");
    let chain = load_chain(cli, &mut m)?;
    let text = match anchors {
        Some(p) => {
            let t = std::fs::read_to_string(p).map_err(|e| {
                CliError::Validation(format!("cannot read anchors file {}: {e}", p.display()))
            })?;
            m.input(p.display().to_string(), &t);
            t
        }
        None => input_text(&mut m, None, resources::MO41_ANCHORS)?,
    };
    let cfg = AnchorConfig::from_json_str(&text).map_err(|e| match anchors {
        Some(p) => CliError::Validation(format!("{}: {e}", p.display())),
        None => e.into(),
    })?;
    m.version("anchors", &cfg.version);
    let scenario: ScenarioKind = scenario.parse()?;
    let channel: ElectronicChannel = channel
        .parse()
        .map_err(|e| CliError::Validation(format!("channel: {e}")))?;
    let b = build_budget(&chain, &channel, &cfg, probe, scenario)?;
    let signal = SignalModel::calibrated(&cfg)?;
    let bound = chi_bound(b.combined(), b.signal_nominal_ev)?;
    let band = chi_band(&signal, b.combined())?;
    let qed = qed_correction(&signal, 0.5)?;

    let mut t = Table::new([
        "Barrier",
        "Scaling",
        "Raw (eV)",
        "Current (eV)",
        "Projected (eV)",
        "Note",
    ]);
    for e in &b.entries {
        t.row([
            e.name.clone(),
            e.scaling.clone(),
            sci_opt(e.raw_ev),
            sci_opt(e.current_ev),
            sci_opt(e.projected_ev),
            e.note.clone(),
        ]);
    }
    t.row([
        "Combined".into(),
        String::new(),
        String::new(),
        sci(b.combined_current_ev),
        sci(b.combined_projected_ev),
        String::new(),
    ]);
    let mut out = String::new();
    let element = chain.element.clone();
    writeln!(
        out,
        "Barrier budget: {probe}{element}, channel {}, scenario {scenario}, anchors {}",
        b.channel, cfg.version
    )
    .unwrap();
    out.push_str(&t.render());
    writeln!(out, "Dominant barrier ({scenario}): {}", b.dominant).unwrap();
    writeln!(
        out,
        "Combined residual ({scenario}): {} eV",
        sci(b.combined())
    )
    .unwrap();
    writeln!(
        out,
        "Largest single residual ({scenario}): {} eV",
        sci(b.max())
    )
    .unwrap();
    writeln!(out, "Signal at chi = 1: {} eV", sci(b.signal_nominal_ev)).unwrap();
    writeln!(out, "|chi - 1| bound: {}", sci(bound)).unwrap();
    for p in &band.points {
        writeln!(
            out,
            "  {:<18} f = {:<9} signal {} eV  |chi - 1| <= {}",
            p.label,
            sci(p.form_factor),
            sci(p.signal_ev),
            sci(p.chi_bound)
        )
        .unwrap();
    }
    writeln!(
        out,
        "  conservative band: [{}, {}]",
        sci(band.conservative[0]),
        sci(band.conservative[1])
    )
    .unwrap();
    writeln!(
        out,
        "QED (Z alpha)^2 correction: {}; residual at 50% beta2 variation {} eV",
        sci(qed.fractional),
        sci(qed.residual_ev)
    )
    .unwrap();

    let csv = csv_string(
        &["barrier", "scaling", "raw_eV", "current_eV", "projected_eV"],
        b.entries
            .iter()
            .map(|e| {
                vec![
                    e.name.clone(),
                    e.scaling.clone(),
                    sci_opt(e.raw_ev),
                    sci_opt(e.current_ev),
                    sci_opt(e.projected_ev),
                ]
            })
            .chain(std::iter::once(vec![
                "Combined".into(),
                String::new(),
                String::new(),
                sci(b.combined_current_ev),
                sci(b.combined_projected_ev),
            ]))
            .collect(),
    );
    let report = BudgetReport {
        manifest: m,
        budget: b,
        chi_bound: bound,
        chi_band: band,
        qed,
    };
    emit(cli, "budget", &report, out, csv, &[])
}

fn solvability(cli: &Cli, transitions: u32, nbkg: u32, add: &[u32]) -> Result<String, CliError> {
    let mut m = RunManifest::new("solvability");
    let chain = load_chain(cli, &mut m)?;
    let frib_text = input_text(&mut m, None, resources::MO_FRIB_CANDIDATES)?;
    let (_, frib) = nucdata::records_from_csv_str(&frib_text)?;
    let mut added: Vec<IsotopeRecord> = Vec::new();
    for &a in add {
        if chain.get(a).is_some() {
            return Err(CliError::Validation(format!(
                "A={a} is already in the chain"
            )));
        }
        let rec = frib
            .iter()
            .find(|r| r.mass_number == a)
            .cloned()
            .ok_or_else(|| {
                CliError::Validation(format!("A={a} is not a known candidate isotope"))
            })?;
        added.push(rec);
    }
    let rows = topology_table(&chain, &frib, nbkg, None);
    let requested = requested_row(&chain, &added, transitions, nbkg);

    let mut t = Table::new([
        "Topology",
        "N_ee",
        "N_odd",
        "N_trans(K=2)",
        "Solvable?",
        "Feasibility",
    ]);
    for r in rows.iter().chain(std::iter::once(&requested)) {
        t.row([
            r.label.clone(),
            r.topology.n_ee.to_string(),
            r.topology.n_odd.to_string(),
            r.topology.n_trans_rank2.to_string(),
            r.solvability.verdict.clone(),
            r.feasibility.clone(),
        ]);
    }
    let mut out = String::new();
    writeln!(
        out,
        "Rank-2 topologies for the {} chain, N_bkg = {nbkg} ({} unknowns)",
        chain.element,
        nbkg + 1
    )
    .unwrap();
    out.push_str(&t.render());
    writeln!(out, "(f) needs radioactive-beam production plus independent Qs, B(E2) and charge-radius measurements").unwrap();
    writeln!(
        out,
        "(g) needs quantum-logic spectroscopy at hard X-ray energies"
    )
    .unwrap();
    writeln!(
        out,
        "Counting only; rank is checked by `condition` and `extract`."
    )
    .unwrap();

    let csv = csv_string(
        &[
            "topology",
            "n_ee",
            "n_odd",
            "n_trans_rank2",
            "solvable",
            "n_equations",
            "n_unknowns",
            "verdict",
            "feasibility",
        ],
        rows.iter()
            .chain(std::iter::once(&requested))
            .map(|r| {
                vec![
                    r.label.clone(),
                    r.topology.n_ee.to_string(),
                    r.topology.n_odd.to_string(),
                    r.topology.n_trans_rank2.to_string(),
                    r.solvability.solvable.to_string(),
                    r.solvability.n_equations.to_string(),
                    r.solvability.n_unknowns.to_string(),
                    r.solvability.verdict.clone(),
                    r.feasibility.clone(),
                ]
            })
            .collect(),
    );
    let report = SolvabilityReport {
        manifest: m,
        n_bkg: nbkg,
        rows,
        requested,
    };
    emit(cli, "solvability", &report, out, csv, &[])
}

fn condition(
    cli: &Cli,
    spec_path: Option<&Path>,
    coeffs_path: Option<&Path>,
    samples: Option<usize>,
    positive: bool,
    sequential: bool,
) -> Result<String, CliError> {
    let mut m = RunManifest::new("condition");
    let chain = load_chain(cli, &mut m)?;
    let coeffs = load_coeffs(&mut m, coeffs_path)?;
    let bundled = if positive {
        resources::MO91_SAMPLING_POSITIVE
    } else {
        resources::MO91_SAMPLING
    };
    let text = input_text(&mut m, spec_path, bundled)?;
    let mut spec = SamplingSpec::from_json_str(&text)?;
    if let Some(n) = samples {
        spec.sample_count = n;
    }
    if let Some(s) = cli.seed {
        spec.seed = s;
    }
    spec.validate()?;
    m.seed = Some(spec.seed);
    m.version("sampling", &spec.version);
    let exec = if sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let (summary, values) = sample_kappa_values(&chain, &coeffs, &spec, exec)?;
    if summary.rank_deficient_fraction < 1.0 && !summary.mean.is_finite() {
        return Err(CliError::Numerical(
            "non-finite mean condition number".into(),
        ));
    }
    let histogram = kappa_histogram(&values);
    let csv = histogram_csv(&histogram);

    let mut out = String::new();
    writeln!(
        out,
        "Condition number of the preconditioned design matrix ({})",
        spec.version
    )
    .unwrap();
    writeln!(out, "samples            {}", summary.sample_count).unwrap();
    writeln!(out, "seed               {}", summary.seed).unwrap();
    for (k, v) in [
        ("mean", summary.mean),
        ("std", summary.std),
        ("median", summary.median),
        ("p5", summary.p5),
        ("p95", summary.p95),
        ("p99", summary.p99),
        ("max", summary.max),
        ("rank-deficient", summary.rank_deficient_fraction),
        ("guard-excluded", summary.guard_excluded_fraction),
    ] {
        writeln!(out, "{k:<18} {}", sci(v)).unwrap();
    }
    let report = ConditionReport {
        manifest: m,
        spec,
        summary,
        histogram,
    };
    emit(
        cli,
        "condition",
        &report,
        out,
        csv.clone(),
        &[("kappa-histogram.csv", csv.as_str())],
    )
}

fn extract_cmd(cli: &Cli, rhs: &str, coeffs_path: Option<&Path>) -> Result<String, CliError> {
    let mut m = RunManifest::new("extract");
    let chain = load_chain(cli, &mut m)?;
    let coeffs = load_coeffs(&mut m, coeffs_path)?;
    let text = match rhs.strip_prefix("bundled:") {
        Some(name) => input_text(&mut m, None, name)?,
        None => input_text(&mut m, Some(Path::new(rhs)), "")?,
    };
    let set = ObservationSet::from_json_str(&text)
        .map_err(|e| CliError::Validation(format!("{rhs}: {e}")))?;
    m.version("observations", &set.version);
    if set.synthetic.is_some() {
        m.seed = Some(
            cli.seed
                .unwrap_or_else(|| set.synthetic.as_ref().map(|s| s.seed).unwrap_or(0)),
        );
    }
    let sys = set.assemble(&chain, &coeffs, cli.seed)?;
    let result = extract(&sys.design, &sys.sigma_ev)?;
    let finite = result.alpha_manko_hat.value.is_finite()
        && result.alpha_manko_hat.std_error.is_finite()
        && result
            .background_estimates
            .iter()
            .all(|e| e.value.is_finite() && e.std_error.is_finite());
    if !finite {
        return Err(CliError::Numerical(
            "extraction produced non-finite estimates".into(),
        ));
    }

    let mut t = Table::new(["Unknown", "Estimate", "Std. error", "Injected"]);
    let mut estimates: Vec<_> = result.background_estimates.clone();
    estimates.push(result.alpha_manko_hat.clone());
    let mut csv_rows = Vec::new();
    for (i, e) in estimates.iter().enumerate() {
        let injected = sys
            .truth
            .as_ref()
            .map(|t| sci(t[i]))
            .unwrap_or_else(|| "---".into());
        t.row([
            e.name.clone(),
            sci(e.value),
            sci(e.std_error),
            injected.clone(),
        ]);
        csv_rows.push(vec![
            e.name.clone(),
            sci(e.value),
            sci(e.std_error),
            injected,
        ]);
    }
    let mut out = String::new();
    writeln!(
        out,
        "Extraction from {} ({} rows x {} unknowns)",
        set.version,
        sys.design.nrows(),
        sys.design.ncols()
    )
    .unwrap();
    out.push_str(&t.render());
    writeln!(out, "condition number   {}", sci(result.condition_number)).unwrap();
    writeln!(out, "residual norm      {} eV", sci(result.residual_norm)).unwrap();
    writeln!(
        out,
        "chi-squared        {} ({} dof)",
        sci(result.chi_squared),
        result.degrees_of_freedom
    )
    .unwrap();
    writeln!(out, "|chi - 1| bound    {}", sci(result.chi_bound)).unwrap();
    for n in &result.notes {
        writeln!(out, "note: {n}").unwrap();
    }
    let csv = csv_string(&["unknown", "estimate", "std_error", "injected"], csv_rows);
    let report = ExtractReport {
        manifest: m,
        rows: sys.design.rows.clone(),
        columns: sys.design.columns.clone(),
        result,
        truth: sys.truth,
    };
    emit(cli, "extract", &report, out, csv, &[])
}

fn milestones(
    cli: &Cli,
    target: Option<f64>,
    ladder_path: Option<&Path>,
) -> Result<String, CliError> {
    let mut m = RunManifest::new("milestones");
    let text = input_text(&mut m, ladder_path, resources::MILESTONES)?;
    let ladder = MilestoneLadder::from_json_str(&text)?;
    m.version("milestones", &ladder.version);
    let lookup = target.map(|t| ladder.lookup(t)).transpose()?;

    let mut t = Table::new([
        "",
        "Sensitivity (eV)",
        "Dominant barrier",
        "Required advance",
        "Era",
    ]);
    for (i, r) in ladder.rows.iter().enumerate() {
        let mark = if lookup.as_ref().is_some_and(|l| l.index == i) {
            ">"
        } else {
            ""
        };
        t.row([
            mark.to_string(),
            sci(r.sensitivity_ev),
            r.dominant_barrier.clone(),
            r.required_advance.clone(),
            ladder.era_of(r.sensitivity_ev).label().to_string(),
        ]);
    }
    let mut out = String::new();
    writeln!(out, "Milestone ladder ({})", ladder.version).unwrap();
    out.push_str(&t.render());
    if let Some(l) = &lookup {
        writeln!(
            out,
            "Target {} eV -> row {} (bin [{}, {}] eV): {} / {}; era: {}",
            sci(l.target_ev),
            sci(l.row.sensitivity_ev),
            sci(l.bin_ev[0]),
            sci(l.bin_ev[1]),
            l.row.dominant_barrier,
            l.row.required_advance,
            l.era.label()
        )
        .unwrap();
    }
    let csv = csv_string(
        &[
            "sensitivity_eV",
            "dominant_barrier",
            "required_advance",
            "era",
            "selected",
        ],
        ladder
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                vec![
                    sci(r.sensitivity_ev),
                    r.dominant_barrier.clone(),
                    r.required_advance.clone(),
                    ladder.era_of(r.sensitivity_ev).label().into(),
                    lookup.as_ref().is_some_and(|l| l.index == i).to_string(),
                ]
            })
            .collect(),
    );
    let report = MilestonesReport {
        manifest: m,
        ladder,
        lookup,
    };
    emit(cli, "milestones", &report, out, csv, &[])
}

/// Seconds from `930`, `930s`, `15.5min`, `15.5 min` or `2h`.
pub(crate) fn parse_duration_s(text: &str) -> Result<f64, CliError> {
    let t = text.trim();
    let split = t.find(|c: char| c.is_ascii_alphabetic()).unwrap_or(t.len());
    let (num, unit) = t.split_at(split);
    let value: f64 = num
        .trim()
        .parse()
        .map_err(|_| CliError::Validation(format!("cannot parse duration {text:?}")))?;
    let factor = match unit.trim() {
        "" | "s" => 1.0,
        "min" | "m" => 60.0,
        "h" => 3600.0,
        other => {
            return Err(CliError::Validation(format!(
                "unknown duration unit {other:?} in {text:?}"
            )))
        }
    };
    Ok(value * factor)
}

fn ramsey(
    cli: &Cli,
    half_life: Option<&str>,
    tr: Option<&str>,
    reps: u64,
) -> Result<String, CliError> {
    let mut m = RunManifest::new("ramsey");
    let half_life_s = half_life.map(parse_duration_s).transpose()?;
    let t_r = match (tr, half_life_s) {
        (Some(t), _) => parse_duration_s(t)?,
        (None, Some(h)) => gkpforge::budget::optimal_interrogation_time(h)?,
        (None, None) => 1.0,
    };
    let plan = ramsey_plan(half_life_s, t_r, reps)?;
    m.version("planck_ev_s", &format!("{:e}", plan.planck_ev_s));

    let mut rows: Vec<(&str, String)> = vec![
        ("half-life (s)", sci_opt(plan.half_life_s)),
        ("T_R requested (s)", sci(plan.t_r_requested_s)),
        ("T_R optimum (s)", sci_opt(plan.t_r_opt_s)),
        (
            "T_R optimum (min)",
            sci_opt(plan.t_r_opt_s.map(|t| t / 60.0)),
        ),
        ("T_R used (s)", sci(plan.t_r_used_s)),
        ("per-shot linewidth (Hz)", sci(plan.per_shot_linewidth_hz)),
        ("repetitions", plan.repetitions.to_string()),
        (
            "campaign sensitivity (Hz)",
            sci(plan.campaign_sensitivity_hz),
        ),
        (
            "campaign sensitivity (eV)",
            sci(plan.campaign_sensitivity_ev),
        ),
        (
            "decay penalty at requested T_R",
            sci_opt(plan.decay_penalty_at_requested),
        ),
    ];
    rows.push(("h (eV s)", sci(plan.planck_ev_s)));
    let mut out = String::from("Ramsey interrogation plan\n");
    for (k, v) in &rows {
        writeln!(out, "{k:<32} {v}").unwrap();
    }
    for w in &plan.warnings {
        writeln!(out, "warning: {w}").unwrap();
    }
    let csv = csv_string(
        &["quantity", "value"],
        rows.iter()
            .map(|(k, v)| vec![k.to_string(), v.clone()])
            .collect(),
    );
    let report = RamseyReport { manifest: m, plan };
    emit(cli, "ramsey", &report, out, csv, &[])
}
