use std::fmt::Write as _;
use std::io::Write as _;
use std::time::Duration;

use clap::ValueEnum;
use magic_iop::arrangement::{ReducedIop, Region, WalkStats};
use magic_iop::ehrhart::CountFunctionSample;
use magic_iop::exact::Rational;
use magic_iop::gfun::{GroupingMetrics, Quasipolynomial, RationalGF};
use magic_iop::magic::{MagicSpec, SymmetryReport};
use magic_iop::polytope::AffineEmbedding;
use magic_iop::run::RunOutcome;
use serde::Serialize;

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum Format {
    Text,
    Structured,
}

#[derive(Serialize)]
struct Gf {
    text: String,
    #[serde(flatten)]
    value: RationalGF,
}

#[derive(Serialize)]
struct RegionEntry {
    lineage: String,
    constraints: Vec<String>,
}

#[derive(Serialize)]
struct Symmetry {
    from: u64,
    to: u64,
    divisible_by_8: bool,
}

/// Everything a command reports. Serialized fields form the structured
/// output, which depends only on the problem; timings and traversal
/// statistics go to the text output or to stderr.
#[derive(Serialize, Default)]
pub struct Report {
    command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    problem: Option<MagicSpec>,
    #[serde(skip_serializing_if = "Option::is_none")]
    hyperplanes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    reduced_dim: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    embedding: Option<AffineEmbedding>,
    #[serde(skip_serializing_if = "Option::is_none")]
    regions: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_regions_per_subproblem: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    count_at: Option<CountFunctionSample>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quasipolynomial: Option<Quasipolynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generating_function: Option<Gf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    series: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    symmetry: Option<Symmetry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verified: Option<Vec<CountFunctionSample>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    grouping: Option<Vec<GroupingMetrics>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    region_list: Option<Vec<RegionEntry>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    inside_out: Option<Quasipolynomial>,
    #[serde(skip_serializing_if = "Option::is_none")]
    brute_force: Option<CountFunctionSample>,
    #[serde(skip)]
    timings: Vec<(String, Duration)>,
    #[serde(skip)]
    stats: Option<WalkStats>,
    #[serde(skip)]
    subproblems: Option<usize>,
    #[serde(skip)]
    restored: u64,
    #[serde(skip)]
    grouping_elapsed: Vec<Duration>,
}

impl Report {
    pub fn magic(o: &RunOutcome) -> Self {
        Self {
            command: "magic",
            problem: Some(o.config.spec),
            hyperplanes: Some(o.hyperplanes),
            reduced_dim: Some(o.reduced_dim),
            regions: Some(o.regions),
            max_regions_per_subproblem: o.config.max_regions,
            count_at: o.config.count_at.zip(o.count.clone()).map(|(t, count)| CountFunctionSample { t, count }),
            quasipolynomial: o.quasipolynomial.clone(),
            timings: o.timings.iter().map(|(k, d)| (k.to_string(), *d)).collect(),
            stats: Some(WalkStats {
                peak_live: o.peak_live,
                nodes: 0,
                regions: o.regions as usize,
            }),
            subproblems: Some(o.subproblems),
            restored: o.restored,
            ..Self::default()
        }
    }

    pub fn ehrhart(q: &Quasipolynomial) -> Self {
        Self {
            command: "ehrhart",
            quasipolynomial: Some(q.clone()),
            ..Self::default()
        }
    }

    pub fn regions(reduced: &ReducedIop, regions: &[Region], show: bool) -> Self {
        Self {
            command: "regions",
            hyperplanes: Some(reduced.iop.hyperplanes.len()),
            reduced_dim: Some(reduced.iop.polytope.dim()),
            embedding: Some(reduced.embedding.clone()),
            regions: Some(regions.len() as u64),
            region_list: show.then(|| {
                regions
                    .iter()
                    .map(|r| RegionEntry {
                        lineage: r.lineage.clone(),
                        constraints: r.polytope.canonical().to_string().lines().map(String::from).collect(),
                    })
                    .collect()
            }),
            ..Self::default()
        }
    }

    pub fn brute(spec: &MagicSpec, t: u64, count: u64) -> Self {
        Self {
            command: "brute",
            problem: Some(*spec),
            brute_force: Some(CountFunctionSample { t, count: count.into() }),
            ..Self::default()
        }
    }

    pub fn timing(&mut self, stage: &str, d: Duration) {
        self.timings.push((stage.to_string(), d));
    }

    pub fn walk(&mut self, stats: WalkStats) {
        self.stats = Some(stats);
    }

    pub fn series(&mut self, coeffs: Vec<Rational>) {
        self.series = Some(coeffs.iter().map(|c| c.to_string()).collect());
    }

    pub fn generating_function(&mut self, gf: &RationalGF) {
        self.generating_function = Some(Gf {
            text: gf.render(),
            value: gf.clone(),
        });
    }

    pub fn symmetry(&mut self, s: SymmetryReport) {
        self.symmetry = Some(Symmetry {
            from: s.checked.first().map_or(0, |c| c.t),
            to: s.checked.last().map_or(0, |c| c.t),
            divisible_by_8: true,
        });
    }

    pub fn verified(&mut self, checked: Vec<CountFunctionSample>) {
        self.verified = Some(checked);
    }

    pub fn grouping(&mut self, rows: Vec<GroupingMetrics>) {
        self.grouping_elapsed = rows.iter().map(|m| m.elapsed).collect();
        self.grouping = Some(rows);
    }

    pub fn inside_out(&mut self, q: &Quasipolynomial) {
        self.inside_out = Some(q.clone());
    }

    fn text(&self) -> String {
        let mut s = String::new();
        if let Some(p) = &self.problem {
            let _ = writeln!(s, "problem: {0}×{0} {1}", p.n, p.variant);
        }
        if let Some(h) = self.hyperplanes {
            let _ = writeln!(s, "hyperplanes after restriction: {h}");
        }
        if let Some(d) = self.reduced_dim {
            let _ = writeln!(s, "reduced dimension: {d}");
        }
        if let Some(e) = &self.embedding {
            let _ = writeln!(s, "dilation step: {}", e.step);
        }
        if let Some(r) = self.regions {
            let _ = writeln!(s, "regions: {r}");
        }
        if let Some(m) = self.max_regions_per_subproblem {
            let _ = writeln!(s, "truncated at {m} regions per subproblem");
        }
        if let Some(c) = &self.count_at {
            let _ = writeln!(s, "count at t = {}: {}", c.t, c.count);
        }
        if let Some(q) = &self.quasipolynomial {
            let _ = writeln!(s, "quasipolynomial (period {}):", q.period());
            for line in q.render().lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        if let Some(g) = &self.generating_function {
            let _ = writeln!(s, "generating function: {}", g.text);
        }
        if let Some(series) = &self.series {
            let _ = writeln!(s, "series: {}", series.join(", "));
        }
        if let Some(sym) = &self.symmetry {
            let _ = writeln!(s, "divisible by 8 for t = {}..{}", sym.from, sym.to);
        }
        if let Some(v) = &self.verified {
            let _ = writeln!(s, "verified against {} direct counts", v.len());
        }
        if let Some(rows) = &self.grouping {
            let _ = writeln!(s, "grouping strategies:");
            let _ = writeln!(
                s,
                "  {:<26} {:>7} {:>10} {:>12} {:>12} {:>10}",
                "strategy", "inputs", "additions", "max num deg", "max den len", "elapsed"
            );
            for (m, d) in rows.iter().zip(&self.grouping_elapsed) {
                let name = serde_json::to_value(m.strategy).unwrap();
                let _ = writeln!(
                    s,
                    "  {:<26} {:>7} {:>10} {:>12} {:>12} {:>10.3?}",
                    name.as_str().unwrap_or_default(),
                    m.inputs,
                    m.additions,
                    m.max_numerator_degree,
                    m.max_denominator_factors,
                    d
                );
            }
        }
        if let Some(list) = &self.region_list {
            for r in list {
                let lineage = if r.lineage.is_empty() { "(root)" } else { &r.lineage };
                let _ = writeln!(s, "region {lineage}:");
                for c in &r.constraints {
                    let _ = writeln!(s, "  {c}");
                }
            }
        }
        if let Some(q) = &self.inside_out {
            let _ = writeln!(s, "inside-out counting function (period {}):", q.period());
            for line in q.render().lines() {
                let _ = writeln!(s, "  {line}");
            }
        }
        if let Some(b) = &self.brute_force {
            let _ = writeln!(s, "count at t = {}: {}", b.t, b.count);
        }
        s
    }

    fn diagnostics(&self) -> String {
        let mut s = String::new();
        if let Some(n) = self.subproblems {
            let _ = writeln!(s, "subproblems: {n}");
        }
        if let Some(st) = &self.stats {
            let _ = writeln!(s, "peak live pieces: {}", st.peak_live);
        }
        if self.restored > 0 {
            let _ = writeln!(s, "regions restored from checkpoint: {}", self.restored);
        }
        for (stage, d) in &self.timings {
            let _ = writeln!(s, "time {stage}: {d:.3?}");
        }
        s
    }

    pub fn print(&self, format: Format) {
        let mut out = std::io::stdout().lock();
        let _ = match format {
            Format::Text => write!(out, "{}{}", self.text(), self.diagnostics()),
            Format::Structured => {
                let json = serde_json::to_string_pretty(self).expect("report serializes");
                eprint!("{}", self.diagnostics());
                writeln!(out, "{json}")
            }
        };
    }
}
