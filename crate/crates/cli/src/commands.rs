//! Subcommand implementations.

use std::path::Path;

use boundbell::bell::{
    bell_value, optimize_settings, quantum_bound, BellSettings, OptimizerConfig, LHV_BOUND,
};
use boundbell::eigen::block_count;
use boundbell::format::{operator_from_json, operator_to_json, state_from_json, state_to_json, ExtractionTrace};
use boundbell::locc::extract_pair;
use boundbell::ppt::{classify_rho_n, ppt_check, scan as ppt_scan, subsets_up_to, PptReport, Verdict};
use boundbell::states::{ghz, random_pure, rho_n, RhoFamilySpec};
use boundbell::{DensityOperator, PartyLayout, PureState};
use serde::Serialize;

use crate::config::{emit, read_file, resolve_tol, to_json, write_file, CliError, RunConfig};
use crate::{BellArgs, ExtractArgs, FamilyArgs, Format, ScanArgs, StateArgs, SweepArgs};

/// `foo.json` -> `foo.<tag>.json`.
fn sibling(path: &str, tag: &str) -> String {
    let p = Path::new(path);
    let stem = p.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    p.with_file_name(format!("{stem}.{tag}.json")).to_string_lossy().into_owned()
}

/// Operator from `--input` or rho_N, with the config fields filled in.
fn load_operator(src: &FamilyArgs, cfg: &mut RunConfig) -> Result<DensityOperator, CliError> {
    match (&src.input, src.n) {
        (Some(path), _) => {
            let rho = operator_from_json(&read_file(path)?)?;
            cfg.input = Some(path.clone());
            cfg.n = Some(rho.layout().parties());
            Ok(rho)
        }
        (None, Some(n)) => {
            let alpha = src.alpha.resolve(n);
            let rho = rho_n(&RhoFamilySpec::new(n, alpha)?)?;
            cfg.n = Some(n);
            cfg.alpha = Some(alpha);
            cfg.alpha_auto = Some(src.alpha.is_auto());
            Ok(rho)
        }
        (None, None) => Err(CliError::Usage("give --n or --input".into())),
    }
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>, comments: &[String]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| CliError::Io(e.to_string()))?;
    for row in rows {
        w.write_record(&row).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    let mut out = String::new();
    for c in comments {
        out.push_str("# ");
        out.push_str(c);
        out.push('\n');
    }
    out.push_str(&String::from_utf8(body).expect("csv output is utf-8"));
    Ok(out)
}

fn compact<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("report types serialize")
}

#[derive(Serialize)]
struct StateReport<'a> {
    config: &'a RunConfig,
    operator: String,
    ghz: String,
    nonzeros: usize,
    blocks: usize,
}

pub fn state(args: StateArgs) -> Result<(), CliError> {
    let alpha = args.alpha.resolve(args.n);
    let spec = RhoFamilySpec::new(args.n, alpha)?;
    let rho = rho_n(&spec)?;
    let psi = ghz(args.n, alpha)?;
    let out = args.out.unwrap_or_else(|| format!("rho_N{}.json", args.n));
    let ghz_out = sibling(&out, "ghz");
    write_file(&out, &operator_to_json(&rho))?;
    write_file(&ghz_out, &state_to_json(&psi))?;
    let config = RunConfig {
        command: "state",
        n: Some(args.n),
        alpha: Some(alpha),
        alpha_auto: Some(args.alpha.is_auto()),
        ..Default::default()
    };
    let report = StateReport {
        config: &config,
        operator: out,
        ghz: ghz_out,
        nonzeros: rho.nonzeros().len(),
        blocks: block_count(rho.matrix()),
    };
    emit(None, &to_json(&report))
}

#[derive(Serialize)]
struct ScanReport<'a> {
    config: &'a RunConfig,
    #[serde(rename = "N")]
    n: usize,
    alpha: Option<f64>,
    reports: &'a [PptReport],
    all_ppt: bool,
    ppt_single: bool,
    npt_pairs: Option<bool>,
    bound_entangled_claim: bool,
}

pub fn scan(args: ScanArgs) -> Result<(), CliError> {
    let tol = resolve_tol(args.tol.tol)?;
    let mut cfg = RunConfig { command: "scan", tol: Some(tol), ..Default::default() };
    let rho = load_operator(&args.source, &mut cfg)?;
    let n = rho.layout().parties();
    let result = ppt_scan(&rho, tol)?;

    let ppt_single = result.reports_of_size(1).all(|r| r.verdict == Verdict::Psd);
    let npt_pairs = if n >= 3 {
        // pairs outside the scan range are checked directly
        let mut all = true;
        for pair in subsets_up_to(n, 2).into_iter().filter(|s| s.len() == 2) {
            let verdict = match result.reports.iter().find(|r| r.subset == pair) {
                Some(r) => r.verdict,
                None => ppt_check(&rho, &pair, tol)?.verdict,
            };
            all &= verdict == Verdict::NotPsd;
        }
        Some(all)
    } else {
        None
    };
    let report = ScanReport {
        config: &cfg,
        n,
        alpha: cfg.alpha,
        reports: &result.reports,
        all_ppt: result.all_ppt,
        ppt_single,
        npt_pairs,
        bound_entangled_claim: ppt_single && npt_pairs == Some(true),
    };
    let text = match args.format {
        Format::Json => to_json(&report),
        Format::Csv => {
            let rows = result
                .reports
                .iter()
                .map(|r| {
                    let subset: Vec<String> = r.subset.iter().map(ToString::to_string).collect();
                    vec![subset.join(" "), r.min_eigenvalue.to_string(), compact(&r.verdict).trim_matches('"').to_string()]
                })
                .collect();
            let summary = format!(
                "all_ppt={} ppt_single={} npt_pairs={} bound_entangled_claim={}",
                report.all_ppt,
                ppt_single,
                npt_pairs.map_or("n/a".to_string(), |b| b.to_string()),
                report.bound_entangled_claim
            );
            csv_text(&["subset", "min_eig", "verdict"], rows, &[compact(&cfg), summary])?
        }
    };
    emit(args.out.as_deref(), &text)
}

#[derive(Serialize)]
struct OptimizerInfo {
    restart: usize,
    sweeps: usize,
}

#[derive(Serialize)]
struct BellReport<'a> {
    config: &'a RunConfig,
    value: f64,
    bound: f64,
    violation: bool,
    quantum_bound: f64,
    settings: &'a BellSettings,
    #[serde(skip_serializing_if = "Option::is_none")]
    optimizer: Option<OptimizerInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    settings_file: Option<String>,
}

/// `|value|` above the bound by more than `tol`.
fn violates(value: f64, tol: f64) -> bool {
    value.abs() > LHV_BOUND + tol
}

pub fn bell(args: BellArgs) -> Result<(), CliError> {
    let tol = resolve_tol(args.tol.tol)?;
    let mut cfg = RunConfig { command: "bell", tol: Some(tol), settings: Some(args.settings.clone()), ..Default::default() };
    let rho = load_operator(&args.source, &mut cfg)?;
    let n = rho.layout().parties();

    let (settings, value, optimizer, settings_file) = match args.settings.as_str() {
        "xy" => {
            let s = BellSettings::xy(n);
            let v = bell_value(&rho, &s)?;
            (s, v, None, None)
        }
        "optimize" => {
            cfg.restarts = Some(args.restarts);
            cfg.seed = Some(args.seed);
            let opt = optimize_settings(
                &rho,
                &OptimizerConfig { restarts: args.restarts, seed: args.seed, ..Default::default() },
            )?;
            let path = args.settings_out.clone().unwrap_or_else(|| match &args.out {
                Some(out) => sibling(out, "settings"),
                None => "best_settings.json".to_string(),
            });
            write_file(&path, &to_json(&opt.settings))?;
            let info = OptimizerInfo { restart: opt.restart, sweeps: opt.sweeps };
            (opt.settings, opt.value, Some(info), Some(path))
        }
        path => {
            let s: BellSettings = serde_json::from_str(&read_file(path)?)
                .map_err(|e| CliError::Usage(format!("settings file {path}: {e}")))?;
            let v = bell_value(&rho, &s)?;
            (s, v, None, None)
        }
    };
    let report = BellReport {
        config: &cfg,
        value,
        bound: LHV_BOUND,
        violation: violates(value, tol),
        quantum_bound: quantum_bound(n),
        settings: &settings,
        optimizer,
        settings_file,
    };
    emit(args.out.as_deref(), &to_json(&report))
}

#[derive(Serialize)]
struct ExtractReport<'a> {
    config: &'a RunConfig,
    #[serde(flatten)]
    trace: &'a ExtractionTrace,
}

#[derive(Serialize)]
struct ExtractSummary<'a> {
    config: &'a RunConfig,
    trace_file: &'a str,
    pair: (usize, usize),
    probability: f64,
    schmidt_coeffs: [f64; 2],
}

pub fn extract(args: ExtractArgs) -> Result<(), CliError> {
    let mut cfg = RunConfig { command: "extract", ..Default::default() };
    let psi: PureState = if let Some(path) = &args.input {
        cfg.input = Some(path.clone());
        state_from_json(&read_file(path)?)?
    } else if let Some(n) = args.ghz {
        let alpha = args.alpha.resolve(n);
        cfg.n = Some(n);
        cfg.alpha = Some(alpha);
        cfg.alpha_auto = Some(args.alpha.is_auto());
        ghz(n, alpha)?
    } else if let Some(dims) = &args.random {
        cfg.dims = Some(dims.clone());
        cfg.seed = Some(args.seed);
        random_pure(&PartyLayout::new(dims.clone())?, args.seed)?
    } else {
        return Err(CliError::Usage("give --input, --ghz or --random".into()));
    };
    let pair = match args.pair.as_deref() {
        None => None,
        Some(&[i, j]) => Some((i, j)),
        Some(other) => return Err(CliError::Usage(format!("--pair takes two parties, got {other:?}"))),
    };
    cfg.pair = pair;

    let result = extract_pair(&psi, pair)?;
    let trace = ExtractionTrace::from_result(&result);
    let full = to_json(&ExtractReport { config: &cfg, trace: &trace });
    match &args.out {
        None => emit(None, &full),
        Some(path) => {
            write_file(path, &full)?;
            let summary = ExtractSummary {
                config: &cfg,
                trace_file: path,
                pair: result.pair,
                probability: result.probability,
                schmidt_coeffs: result.schmidt_coeffs,
            };
            emit(None, &to_json(&summary))
        }
    }
}

#[derive(Serialize)]
struct SweepRow {
    #[serde(rename = "N")]
    n: usize,
    alpha: f64,
    value: f64,
    /// `2^{(N-1)/2} / (N+1)`, reached at the automatic phase.
    predicted: f64,
    violation: bool,
    ppt_single: bool,
    npt_pairs: Option<bool>,
    bound_entangled_claim: bool,
}

#[derive(Serialize)]
struct SweepReport<'a> {
    config: &'a RunConfig,
    rows: &'a [SweepRow],
}

pub fn sweep(args: SweepArgs) -> Result<(), CliError> {
    let tol = resolve_tol(args.tol.tol)?;
    if args.n_min < 2 || args.n_max > boundbell::states::MAX_QUBITS || args.n_min > args.n_max {
        return Err(CliError::Usage(format!(
            "N range {}..={} outside 2..={}",
            args.n_min,
            args.n_max,
            boundbell::states::MAX_QUBITS
        )));
    }
    let cfg = RunConfig {
        command: "sweep",
        alpha: match args.alpha {
            crate::config::Alpha::Fixed(v) => Some(v),
            crate::config::Alpha::Auto => None,
        },
        alpha_auto: Some(args.alpha.is_auto()),
        tol: Some(tol),
        settings: Some("xy".into()),
        n_range: Some((args.n_min, args.n_max)),
        ..Default::default()
    };
    let mut rows = Vec::new();
    for n in args.n_min..=args.n_max {
        let alpha = args.alpha.resolve(n);
        let rho = rho_n(&RhoFamilySpec::new(n, alpha)?)?;
        let value = bell_value(&rho, &BellSettings::xy(n))?;
        drop(rho);
        let class = classify_rho_n(n, alpha, tol)?;
        rows.push(SweepRow {
            n,
            alpha,
            value,
            predicted: quantum_bound(n) / (n as f64 + 1.0),
            violation: violates(value, tol),
            ppt_single: class.ppt_single,
            npt_pairs: class.npt_pairs,
            bound_entangled_claim: class.bound_entangled_claim,
        });
    }
    let text = match args.format {
        Format::Json => to_json(&SweepReport { config: &cfg, rows: &rows }),
        Format::Csv => {
            let body = rows
                .iter()
                .map(|r| {
                    vec![
                        r.n.to_string(),
                        r.alpha.to_string(),
                        r.value.to_string(),
                        r.predicted.to_string(),
                        r.violation.to_string(),
                        r.ppt_single.to_string(),
                        r.npt_pairs.map_or(String::new(), |b| b.to_string()),
                        r.bound_entangled_claim.to_string(),
                    ]
                })
                .collect();
            csv_text(
                &["N", "alpha", "value", "predicted", "violation", "ppt_single", "npt_pairs", "bound_entangled_claim"],
                body,
                &[compact(&cfg)],
            )?
        }
    };
    emit(args.out.as_deref(), &text)
}
