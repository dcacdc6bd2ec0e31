//! CSV and markdown renderings of the computed reports.

use convreg::chip::ChipReport;
use convreg::lab::{TheoremReport, Trajectory};
use convreg::rational::Rat;
use convreg::regularity::{format_f64, ConstantsReport};

pub const CONSTANTS_HEADER: [&str; 12] = [
    "instance",
    "norm_kind",
    "mode",
    "lambda_N",
    "lambda_UN",
    "lambda_D",
    "lambda_G",
    "gamma_lb",
    "gamma_ub",
    "bisect_tol",
    "samples",
    "seed",
];

pub const CHIP_HEADER: [&str; 9] = [
    "instance",
    "point",
    "chip",
    "chip_closure_variant",
    "strong_chip",
    "normal_chip",
    "normal_chip_constant",
    "weak_normal_chip",
    "witness",
];

pub const TRAJECTORY_HEADER: [&str; 3] = ["cycle", "error", "ratio"];

/// Comma-joined exact coordinates, as in `"1,0"`.
pub fn format_vector(v: &[Rat]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn to_csv<const N: usize>(
    header: [&str; N],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

pub fn constants_csv(instance: &str, r: &ConstantsReport) -> String {
    let row = vec![
        instance.to_string(),
        r.norm_kind.name().to_string(),
        r.mode.name().to_string(),
        r.lambda_n.to_string(),
        r.lambda_un.value.to_string(),
        r.lambda_d.to_string(),
        r.lambda_g.to_string(),
        format_f64(r.gamma.lower.value),
        format_f64(r.gamma.upper),
        r.bisect_tol.to_string(),
        r.samples.to_string(),
        r.seed.to_string(),
    ];
    to_csv(CONSTANTS_HEADER, [row])
}

pub fn chip_csv(instance: &str, reports: &[ChipReport]) -> String {
    let rows = reports.iter().map(|r| {
        vec![
            instance.to_string(),
            format_vector(&r.point),
            r.chip.to_string(),
            r.chip_closure_variant.to_string(),
            r.strong_chip.to_string(),
            r.normal_chip.to_string(),
            r.normal_chip_constant.to_string(),
            r.weak_normal_chip.to_string(),
            r.primary_witness()
                .map(|w| format_vector(w))
                .unwrap_or_default(),
        ]
    });
    to_csv(CHIP_HEADER, rows)
}

pub fn trajectory_csv(t: &Trajectory) -> String {
    let rows = t
        .errors
        .iter()
        .zip(&t.ratios)
        .enumerate()
        .map(|(k, (e, r))| {
            vec![
                k.to_string(),
                format_f64(*e),
                r.map(format_f64).unwrap_or_default(),
            ]
        });
    to_csv(TRAJECTORY_HEADER, rows)
}

/// Parameters echoed at the top of a theorem report.
pub struct RunInfo<'a> {
    pub instance: &'a str,
    pub norm: String,
    pub samples: usize,
    pub seed: u64,
}

pub fn theorems_markdown(info: &RunInfo<'_>, reports: &[TheoremReport]) -> String {
    let mut s = format!(
        "# Theorem checks: {}\n\n- norm: {}\n- samples: {}\n- seed: {}\n",
        info.instance, info.norm, info.samples, info.seed
    );
    for r in reports {
        s.push('\n');
        s.push_str(&r.to_markdown());
    }
    s
}
