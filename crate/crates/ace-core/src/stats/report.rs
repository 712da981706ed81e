//! Builds the full analysis report for a scored response file
//! against an item bank: descriptives, reliability, the Rasch fit
//! with item curves and a Wright map, and the correlation and group
//! comparison tables.

use super::alpha::cronbach_alpha;
use super::infer::{pearson, welch_t, CorrelationResult, WelchResult};
use super::matrix::{MetaTable, ResponseMatrix};
use super::rasch::{
    default_theta_grid, icc_points, rasch_fit, sigmoid, wright_map, RaschOptions, WrightMap,
};
use super::{mean, sample_variance, StatsError};
use crate::item::{BloomCategory, ItemBank};
use crate::TOOL_VERSION;
use serde::Serialize;
use std::collections::BTreeMap;

/// Schema tag written into every report.
pub const REPORT_SCHEMA: &str = "ace-report/1";

/// Provenance of one input file, filled in by the caller.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputFile {
    pub role: String,
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ItemStat {
    pub id: String,
    pub category: BloomCategory,
    pub success_rate: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryAlpha {
    pub category: BloomCategory,
    pub alpha: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CategoryScore {
    pub category: BloomCategory,
    pub max_score: usize,
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradeRow {
    pub grade: u32,
    pub n: usize,
    pub mean_total: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Descriptive {
    pub n_persons: usize,
    pub n_items: usize,
    pub total_score_mean: f64,
    pub total_score_sd: f64,
    /// Count of persons at each total score from 0 to the item
    /// count, inclusive.
    pub score_distribution: Vec<usize>,
    pub alpha_total: f64,
    pub alpha_by_category: Vec<CategoryAlpha>,
    pub item_stats: Vec<ItemStat>,
    pub category_score_means: Vec<CategoryScore>,
    /// Mean total score per grade, when grades are available.
    pub by_grade: Vec<GradeRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaschItemRow {
    pub id: String,
    pub difficulty: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaschPersonRow {
    pub id: String,
    pub theta: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RaschSection {
    pub converged: bool,
    pub sweeps: u32,
    pub max_score_residual: f64,
    pub person_reliability: f64,
    pub excluded_items: Vec<String>,
    pub excluded_persons: Vec<String>,
    pub items: Vec<RaschItemRow>,
    pub persons: Vec<RaschPersonRow>,
}

/// Success probability over an ability grid for one fitted item.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IccCurve {
    pub id: String,
    pub difficulty: f64,
    pub points: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LabeledCorrelation {
    pub label: String,
    pub result: Option<CorrelationResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Correlations {
    /// Total score against the external score column, when present.
    pub total_vs_external: Option<CorrelationResult>,
    /// Pearson r between category subscores, in category order;
    /// `null` where undefined. The diagonal is 1.
    pub category_matrix: Vec<Vec<Option<f64>>>,
    pub category_vs_external: Vec<LabeledCorrelation>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupComparison {
    pub grouping: String,
    pub group_a: String,
    pub group_b: String,
    pub welch: WelchResult,
}

/// Everything the analysis computes, serialised as one JSON
/// document.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema: String,
    pub tool_version: String,
    pub inputs: Vec<InputFile>,
    pub bank_name: String,
    pub descriptive: Descriptive,
    pub rasch: RaschSection,
    pub icc: Vec<IccCurve>,
    pub wright_map: WrightMap,
    pub correlations: Correlations,
    pub group_comparison: Option<GroupComparison>,
    /// Human-readable remarks about statistics that were skipped.
    pub notes: Vec<String>,
}

fn category_of(bank: &ItemBank, id: &str) -> BloomCategory {
    bank.item(id).map(|i| i.category).unwrap_or(BloomCategory::ApplyingAnalyzing)
}

/// Per-person subscore on the items of one category.
fn subscores(matrix: &ResponseMatrix, bank: &ItemBank, category: BloomCategory) -> Vec<f64> {
    let indices: Vec<usize> = matrix
        .item_ids()
        .iter()
        .enumerate()
        .filter(|(_, id)| category_of(bank, id) == category)
        .map(|(i, _)| i)
        .collect();
    (0..matrix.n_persons())
        .map(|p| indices.iter().map(|&i| matrix.get(p, i) as u32).sum::<u32>() as f64)
        .collect()
}

/// Runs the complete analysis. The response matrix must have a
/// column for every bank item; extra columns are ignored. Fails
/// when the data cannot support the core statistics, for example
/// when every person has the same total score.
pub fn analyze(
    matrix: &ResponseMatrix,
    meta: &MetaTable,
    bank: &ItemBank,
) -> Result<AnalysisReport, StatsError> {
    let bank_item_ids: Vec<String> = bank.items.iter().map(|i| i.id.clone()).collect();
    let m = matrix.select_items(&bank_item_ids)?;
    let n = m.n_persons();
    let k = m.n_items();
    let mut notes = Vec::new();

    let totals: Vec<f64> = m.person_totals().iter().map(|&t| t as f64).collect();
    let mut score_distribution = vec![0usize; k + 1];
    for &t in &totals {
        score_distribution[t as usize] += 1;
    }

    let alpha_total = cronbach_alpha(&m)?;
    let mut alpha_by_category = Vec::new();
    for category in BloomCategory::ALL {
        let ids: Vec<String> = bank
            .items
            .iter()
            .filter(|i| i.category == category)
            .map(|i| i.id.clone())
            .collect();
        let alpha = if ids.len() < 2 {
            notes.push(format!(
                "alpha for {} skipped: fewer than two items",
                category.name()
            ));
            None
        } else {
            match m.select_items(&ids).and_then(|sub| cronbach_alpha(&sub)) {
                Ok(a) => Some(a),
                Err(err) => {
                    notes.push(format!("alpha for {} skipped: {err}", category.name()));
                    None
                }
            }
        };
        alpha_by_category.push(CategoryAlpha { category, alpha });
    }

    let item_stats: Vec<ItemStat> = m
        .item_ids()
        .iter()
        .enumerate()
        .map(|(i, id)| ItemStat {
            id: id.clone(),
            category: category_of(bank, id),
            success_rate: m.item_total(i) as f64 / n as f64,
        })
        .collect();

    let category_subscores: Vec<(BloomCategory, Vec<f64>)> = BloomCategory::ALL
        .iter()
        .map(|&c| (c, subscores(&m, bank, c)))
        .collect();
    let category_score_means: Vec<CategoryScore> = category_subscores
        .iter()
        .map(|(c, scores)| CategoryScore {
            category: *c,
            max_score: bank.items.iter().filter(|i| i.category == *c).count(),
            mean: mean(scores),
        })
        .collect();

    let mut grade_groups: BTreeMap<u32, Vec<f64>> = BTreeMap::new();
    for (p, id) in m.person_ids().iter().enumerate() {
        if let Some(grade) = meta.get(id).and_then(|x| x.grade) {
            grade_groups.entry(grade).or_default().push(totals[p]);
        }
    }
    let by_grade: Vec<GradeRow> = grade_groups
        .into_iter()
        .map(|(grade, scores)| GradeRow {
            grade,
            n: scores.len(),
            mean_total: mean(&scores),
        })
        .collect();

    let descriptive = Descriptive {
        n_persons: n,
        n_items: k,
        total_score_mean: mean(&totals),
        total_score_sd: sample_variance(&totals).sqrt(),
        score_distribution,
        alpha_total,
        alpha_by_category,
        item_stats,
        category_score_means,
        by_grade,
    };

    let fit = rasch_fit(&m, &RaschOptions::default())?;
    let grid = default_theta_grid();
    let icc: Vec<IccCurve> = fit
        .item_ids
        .iter()
        .zip(&fit.difficulty)
        .map(|(id, &d)| IccCurve {
            id: id.clone(),
            difficulty: d,
            points: icc_points(d, &grid).into_iter().map(|(t, p)| [t, p]).collect(),
        })
        .collect();
    let wright = wright_map(&fit);
    let rasch = RaschSection {
        converged: fit.converged,
        sweeps: fit.sweeps,
        max_score_residual: fit.max_score_residual,
        person_reliability: fit.person_reliability,
        excluded_items: fit.excluded_items.clone(),
        excluded_persons: fit.excluded_persons.clone(),
        items: fit
            .item_ids
            .iter()
            .zip(&fit.difficulty)
            .map(|(id, &d)| RaschItemRow {
                id: id.clone(),
                difficulty: d,
            })
            .collect(),
        persons: fit
            .person_ids
            .iter()
            .zip(fit.theta.iter().zip(&fit.se_theta))
            .map(|(id, (&theta, &se))| RaschPersonRow {
                id: id.clone(),
                theta,
                se,
            })
            .collect(),
    };

    // External scores for the persons that have one, paired with
    // whichever score vector is being correlated against.
    let external: Vec<(usize, f64)> = m
        .person_ids()
        .iter()
        .enumerate()
        .filter_map(|(p, id)| meta.get(id).and_then(|x| x.external_score).map(|s| (p, s)))
        .collect();
    let correlate_external = |scores: &[f64], label: &str, notes: &mut Vec<String>| {
        if external.len() < 3 {
            if !external.is_empty() {
                notes.push(format!(
                    "correlation of {label} with external scores skipped: \
                     fewer than three persons have one"
                ));
            }
            return None;
        }
        let xs: Vec<f64> = external.iter().map(|&(p, _)| scores[p]).collect();
        let ys: Vec<f64> = external.iter().map(|&(_, s)| s).collect();
        match pearson(&xs, &ys) {
            Ok(r) => Some(r),
            Err(err) => {
                notes.push(format!(
                    "correlation of {label} with external scores skipped: {err}"
                ));
                None
            }
        }
    };

    let total_vs_external = correlate_external(&totals, "the total score", &mut notes);
    let category_vs_external: Vec<LabeledCorrelation> = category_subscores
        .iter()
        .map(|(c, scores)| LabeledCorrelation {
            label: c.name().to_string(),
            result: correlate_external(scores, c.name(), &mut notes),
        })
        .collect();

    let mut category_matrix = vec![vec![None; BloomCategory::ALL.len()]; BloomCategory::ALL.len()];
    for (a, (ca, sa)) in category_subscores.iter().enumerate() {
        for (b, (cb, sb)) in category_subscores.iter().enumerate() {
            category_matrix[a][b] = if a == b {
                Some(1.0)
            } else {
                match pearson(sa, sb) {
                    Ok(r) => Some(r.r),
                    Err(err) => {
                        if a < b {
                            notes.push(format!(
                                "correlation between {} and {} skipped: {err}",
                                ca.name(),
                                cb.name()
                            ));
                        }
                        None
                    }
                }
            };
        }
    }

    let mut with_program = Vec::new();
    let mut without_program = Vec::new();
    for (p, id) in m.person_ids().iter().enumerate() {
        match meta.get(id).and_then(|x| x.after_school_programming) {
            Some(true) => with_program.push(totals[p]),
            Some(false) => without_program.push(totals[p]),
            None => {}
        }
    }
    let group_comparison = if with_program.is_empty() && without_program.is_empty() {
        None
    } else {
        match welch_t(&with_program, &without_program) {
            Ok(welch) => Some(GroupComparison {
                grouping: "after_school_programming".to_string(),
                group_a: "yes".to_string(),
                group_b: "no".to_string(),
                welch,
            }),
            Err(err) => {
                notes.push(format!("group comparison skipped: {err}"));
                None
            }
        }
    };

    Ok(AnalysisReport {
        schema: REPORT_SCHEMA.to_string(),
        tool_version: TOOL_VERSION.to_string(),
        inputs: Vec::new(),
        bank_name: bank.name.clone(),
        descriptive,
        rasch,
        icc,
        wright_map: wright,
        correlations: Correlations {
            total_vs_external,
            category_matrix,
            category_vs_external,
        },
        group_comparison,
        notes,
    })
}

impl AnalysisReport {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report serialises");
        text.push('\n');
        text
    }
}

/// Expected success probability under the fitted model, exposed for
/// tests that check curve shapes.
pub fn model_probability(theta: f64, difficulty: f64) -> f64 {
    sigmoid(theta - difficulty)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::item::{
        BloomCategory, Choice, ChoiceContent, Item, ItemBank, ItemKind, Label,
    };
    use crate::stats::matrix::PersonMeta;
    use crate::stats::sim::simulate_matrix;

    fn free_text_item(id: &str, category: BloomCategory) -> Item {
        let choices = vec![
            Choice { label: Label::A, content: ChoiceContent::Text("alpha".into()) },
            Choice { label: Label::B, content: ChoiceContent::Text("bravo".into()) },
            Choice { label: Label::C, content: ChoiceContent::Text("charlie".into()) },
            Choice { label: Label::D, content: ChoiceContent::Text("delta".into()) },
        ];
        Item {
            id: id.to_string(),
            category,
            kind: ItemKind::FreeText,
            stem: format!("question {id}"),
            grids: Vec::new(),
            start: None,
            programs: Vec::new(),
            wall_budget: None,
            choices,
            correct: Label::A,
        }
    }

    fn bank(k_per_category: usize) -> ItemBank {
        let mut items = Vec::new();
        for category in BloomCategory::ALL {
            for i in 0..k_per_category {
                items.push(free_text_item(
                    &format!("{}{:02}", category.id_prefix(), i + 1),
                    category,
                ));
            }
        }
        ItemBank {
            name: "report-test".to_string(),
            version: "1".to_string(),
            generator: None,
            items,
        }
    }

    fn simulated(n: usize, bank: &ItemBank, seed: u64) -> ResponseMatrix {
        let theta: Vec<f64> = (0..n).map(|i| -2.0 + 4.0 * i as f64 / (n - 1) as f64).collect();
        let k = bank.items.len();
        let difficulty: Vec<f64> =
            (0..k).map(|i| -1.5 + 3.0 * i as f64 / (k - 1) as f64).collect();
        simulate_matrix(
            seed,
            &theta,
            &difficulty,
            (0..n).map(|i| format!("s{:03}", i + 1)).collect(),
            bank.items.iter().map(|i| i.id.clone()).collect(),
        )
        .unwrap()
    }

    #[test]
    fn report_covers_all_sections() {
        let bank = bank(4);
        let m = simulated(60, &bank, 5);
        let mut meta = MetaTable::default();
        for (p, id) in m.person_ids().iter().enumerate() {
            meta.insert(
                id.clone(),
                PersonMeta {
                    grade: Some(5 + (p % 2) as u32),
                    age: Some(11),
                    after_school_programming: Some(p % 3 == 0),
                    external_score: Some(m.person_total(p) as f64 + (p % 5) as f64),
                },
            );
        }
        let report = analyze(&m, &meta, &bank).unwrap();
        assert_eq!(report.schema, REPORT_SCHEMA);
        assert_eq!(report.descriptive.n_persons, 60);
        assert_eq!(report.descriptive.n_items, 12);
        assert_eq!(report.descriptive.score_distribution.len(), 13);
        assert_eq!(
            report.descriptive.score_distribution.iter().sum::<usize>(),
            60
        );
        assert_eq!(report.descriptive.alpha_by_category.len(), 3);
        assert_eq!(report.descriptive.by_grade.len(), 2);
        assert_eq!(report.icc.len(), report.rasch.items.len());
        assert!(report.correlations.total_vs_external.is_some());
        assert_eq!(report.correlations.category_matrix[0][0], Some(1.0));
        assert!(report.group_comparison.is_some());
        let fitted: usize = report.wright_map.bins.iter().map(|b| b.count).sum();
        assert_eq!(fitted, report.rasch.persons.len());
        let parsed: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        assert_eq!(parsed["schema"], REPORT_SCHEMA);
    }

    #[test]
    fn constant_totals_are_a_hard_error() {
        let bank = bank(2);
        let ids: Vec<String> = bank.items.iter().map(|i| i.id.clone()).collect();
        let rows = vec![vec![1, 0, 1, 0, 1, 0]; 5];
        let m = ResponseMatrix::new(
            (0..5).map(|i| format!("s{i}")).collect(),
            ids,
            rows,
        )
        .unwrap();
        assert_eq!(
            analyze(&m, &MetaTable::default(), &bank).unwrap_err(),
            StatsError::UndefinedAlpha
        );
    }

    #[test]
    fn missing_bank_item_in_responses_is_reported() {
        let bank = bank(2);
        let m = ResponseMatrix::new(
            vec!["s1".into(), "s2".into()],
            vec!["AA01".into()],
            vec![vec![1], vec![0]],
        )
        .unwrap();
        let err = analyze(&m, &MetaTable::default(), &bank).unwrap_err();
        assert!(matches!(err, StatsError::UnknownItem { .. }));
    }

    #[test]
    fn missing_demographics_leave_optional_sections_empty() {
        let bank = bank(3);
        let m = simulated(40, &bank, 9);
        let report = analyze(&m, &MetaTable::default(), &bank).unwrap();
        assert!(report.correlations.total_vs_external.is_none());
        assert!(report.group_comparison.is_none());
        assert!(report.descriptive.by_grade.is_empty());
    }
}
