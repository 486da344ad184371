//! Report envelopes and plain-text tables.
//!
//! Every command result is wrapped in an [`Envelope`] that echoes the
//! resolved configuration. Text tables print metrics as percentages with
//! two decimals, like the tables they are compared against.

use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crate::corpus::{CorpusStats, Counts, ForumType};
use crate::error::Result;
use crate::eval::{BaselineReport, ExperimentReport, KappaReport, StudyRow, Summary};
use crate::model::Tuning;

#[derive(Debug, Clone, Serialize)]
pub struct Envelope<'a, C: Serialize, R: Serialize> {
    pub command: &'a str,
    /// Seconds since the Unix epoch; `None` under a fixed clock.
    pub generated_at: Option<u64>,
    pub config: &'a C,
    pub result: &'a R,
}

impl<'a, C: Serialize, R: Serialize> Envelope<'a, C, R> {
    pub fn new(command: &'a str, config: &'a C, result: &'a R, fixed_clock: bool) -> Self {
        let generated_at = (!fixed_clock).then(|| {
            SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0)
        });
        Envelope {
            command,
            generated_at,
            config,
            result,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Column-aligned text table. The first column is left-aligned, the rest
/// right-aligned.
#[derive(Debug, Clone, Default)]
pub struct Table {
    header: Vec<String>,
    rows: Vec<Row>,
}

#[derive(Debug, Clone)]
enum Row {
    Cells(Vec<String>),
    Rule,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row<S: Into<String>>(&mut self, cells: impl IntoIterator<Item = S>) -> &mut Self {
        self.rows.push(Row::Cells(cells.into_iter().map(Into::into).collect()));
        self
    }

    pub fn rule(&mut self) -> &mut Self {
        self.rows.push(Row::Rule);
        self
    }

    pub fn render(&self) -> String {
        let ncols = self.header.len();
        let mut widths: Vec<usize> = self.header.iter().map(|h| h.chars().count()).collect();
        for r in &self.rows {
            if let Row::Cells(cells) = r {
                for (k, c) in cells.iter().enumerate().take(ncols) {
                    widths[k] = widths[k].max(c.chars().count());
                }
            }
        }
        let total = widths.iter().sum::<usize>() + 2 * ncols.saturating_sub(1);
        let line = |cells: &[String]| -> String {
            let mut out = String::new();
            for (k, w) in widths.iter().enumerate() {
                let c = cells.get(k).map(String::as_str).unwrap_or("");
                if k > 0 {
                    out.push_str("  ");
                }
                if k == 0 {
                    out.push_str(&format!("{c:<w$}"));
                } else {
                    out.push_str(&format!("{c:>w$}"));
                }
            }
            out.trim_end().to_string() + "\n"
        };
        let mut out = line(&self.header);
        out.push_str(&"-".repeat(total));
        out.push('\n');
        for r in &self.rows {
            match r {
                Row::Cells(cells) => out.push_str(&line(cells)),
                Row::Rule => {
                    out.push_str(&"-".repeat(total));
                    out.push('\n');
                }
            }
        }
        out
    }
}

pub fn pct(x: f64) -> String {
    format!("{:.2}", 100.0 * x)
}

fn opt_pct(x: Option<f64>) -> String {
    x.map(pct).unwrap_or_else(|| "-".into())
}

fn counts_cells(c: &Counts) -> Vec<String> {
    vec![
        c.threads.to_string(),
        c.posts.to_string(),
        c.intervened_threads.to_string(),
        c.intervened_posts.to_string(),
        format!("{:.2}", c.ratio),
    ]
}

/// Per-course counts with a totals row, then the same counts per forum type.
pub fn stats_table(stats: &CorpusStats) -> String {
    let head = ["Course", "# Threads", "# Posts", "# Int. Threads", "# Int. Posts", "Ratio"];
    let mut t = Table::new(head);
    for c in &stats.courses {
        let mut cells = vec![c.course_id.clone()];
        cells.extend(counts_cells(&c.total));
        t.row(cells);
    }
    t.rule();
    let mut cells = vec!["Total".to_string()];
    cells.extend(counts_cells(&stats.total));
    t.row(cells);

    let mut f = Table::new(["Forum type", "# Threads", "# Posts", "# Int. Threads", "# Int. Posts", "Ratio"]);
    for ft in ForumType::ALL {
        if let Some(c) = stats.by_forum.get(&ft) {
            let mut cells = vec![ft.to_string()];
            cells.extend(counts_cells(c));
            f.row(cells);
        }
    }
    t.render() + "\n" + &f.render()
}

fn summary_cells(s: &Summary) -> [String; 4] {
    [pct(s.precision), pct(s.recall), pct(s.f1), format!("{:.2}", s.w)]
}

/// Per-course precision, recall, F1 and W with plain and weighted means.
pub fn experiment_table(r: &ExperimentReport) -> String {
    let mut t = Table::new(["Course", "# Threads", "Ratio", "Prec.", "Rec.", "F1", "W"]);
    for c in &r.courses {
        let mut cells = vec![
            c.course_id.clone(),
            c.threads.to_string(),
            format!("{:.2}", c.intervention_ratio),
        ];
        cells.extend(summary_cells(&c.summary));
        t.row(cells);
    }
    t.rule();
    for (name, s) in [("Average", &r.average), ("Weighted Macro Avg", &r.weighted_macro)] {
        let mut cells = vec![name.to_string(), String::new(), String::new()];
        cells.extend(summary_cells(s));
        t.row(cells);
    }
    format!("{} ({})\n{}", r.kind, r.features, t.render())
}

/// One row per feature configuration, weighted macro averages.
pub fn study_table(rows: &[StudyRow]) -> String {
    let mut t = Table::new(["Features", "Prec.", "Rec.", "F1", "Avg. F1"]);
    for r in rows {
        t.row([
            format!("{}. {}", r.row, r.name),
            pct(r.weighted_macro.precision),
            pct(r.weighted_macro.recall),
            pct(r.weighted_macro.f1),
            pct(r.average.f1),
        ]);
    }
    t.render()
}

/// Learned F1 next to the all-positive baseline.
pub fn baseline_table(r: &BaselineReport) -> String {
    let mut t = Table::new(["Course", "Ratio", "F1", "F1@100R"]);
    for row in &r.rows {
        t.row([
            row.course_id.clone(),
            format!("{:.2}", row.intervention_ratio),
            opt_pct(row.learned_f1),
            pct(row.baseline.f1),
        ]);
    }
    t.rule();
    t.row([
        "Average".to_string(),
        String::new(),
        opt_pct(r.average_learned_f1),
        pct(r.average_baseline_f1),
    ]);
    t.row([
        "Weighted Macro Avg".to_string(),
        String::new(),
        opt_pct(r.weighted_learned_f1),
        pct(r.weighted_baseline_f1),
    ]);
    t.render()
}

pub fn kappa_table(r: &KappaReport) -> String {
    let mut t = Table::new(["Pair", "Kappa"]);
    let show = |k: Option<f64>| k.map(|k| format!("{k:.3}")).unwrap_or_else(|| "undefined".into());
    for p in &r.pairs {
        t.row([format!("{} / {}", p.a, p.b), show(p.kappa)]);
    }
    t.rule();
    t.row(["Average".to_string(), show(r.average)]);
    let scope = match &r.tag {
        Some(tag) => format!("items tagged {tag}"),
        None => "all items".to_string(),
    };
    format!("{} ({} items)\n{}", scope, r.items, t.render())
}

pub fn tuning_table(r: &Tuning) -> String {
    let mut t = Table::new(["W", "Validation F1"]);
    let mut ev = r.evaluated.clone();
    ev.sort_by(|a, b| a.0.total_cmp(&b.0));
    for (w, f1) in ev {
        let mark = if w == r.w { " *" } else { "" };
        t.row([format!("{w:.4}{mark}"), pct(f1)]);
    }
    t.render()
}
