//! CSV dump of the scaled item efficiencies, ordered as plotted
//! (non-decreasing), with optional rounding and group assignment.

use std::io::Write;

use mkp::efficiency::{dual_ordering, dual_or_uniform_efficiencies, WeightSource};
use mkp::instance::Instance;
use mkp::ordering::{get_efficiency_groups, round_scaled};

pub const EFF_HEADER: [&str; 4] = [
    "item_rank",
    "scaled_efficiency",
    "rounded_efficiency",
    "group_id",
];

#[derive(Debug, Clone, PartialEq)]
pub struct EffRow {
    /// Rank in non-decreasing scaled efficiency, 0-based.
    pub item_rank: usize,
    pub scaled: f64,
    /// Present only when a rounding depth was requested.
    pub rounded: Option<f64>,
    /// Group id in order of first appearance; None for ungrouped items or
    /// when no rounding depth was requested.
    pub group_id: Option<usize>,
}

/// Efficiency rows for one instance plus the weight source used. Rows come
/// in non-decreasing scaled efficiency, i.e. the reverse of the repair
/// ordering.
pub fn efficiency_rows(
    inst: &Instance,
    decimals: Option<u32>,
) -> anyhow::Result<(Vec<EffRow>, WeightSource)> {
    let (eff, source) = dual_or_uniform_efficiencies(inst)?;
    let ordering = dual_ordering(&eff);
    let groups = decimals.map(|d| get_efficiency_groups(&ordering, d));

    let n = inst.n();
    let mut rows = Vec::with_capacity(n);
    let mut group_relabel: Vec<Option<usize>> = groups
        .as_ref()
        .map(|g| vec![None; g.len()])
        .unwrap_or_default();
    let mut next_label = 0;
    for rank in 0..n {
        let position = n - 1 - rank; // reverse of the non-increasing ordering
        let scaled = ordering.scaled_at(position);
        let rounded = decimals.map(|d| round_scaled(scaled, d));
        let group_id = groups.as_ref().and_then(|g| {
            g.group_of(position).map(|raw| {
                *group_relabel[raw].get_or_insert_with(|| {
                    let label = next_label;
                    next_label += 1;
                    label
                })
            })
        });
        rows.push(EffRow {
            item_rank: rank,
            scaled,
            rounded,
            group_id,
        });
    }
    Ok((rows, source))
}

pub fn write_efficiency_csv<W: Write>(rows: &[EffRow], out: W) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(EFF_HEADER)?;
    for row in rows {
        w.write_record([
            row.item_rank.to_string(),
            format!("{:.6}", row.scaled),
            row.rounded.map(|r| format!("{r:.6}")).unwrap_or_default(),
            row.group_id.map(|g| g.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
