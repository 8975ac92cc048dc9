//! `macfeas region`: capacity-region boundary data for plotting, plus the
//! required-rate point.
//!
//! For two users the region is a pentagon; its vertices are emitted in
//! boundary order (origin, axis intercepts, and the two decoding-order
//! corner points), optionally densified with `--resolution` sample points
//! along the perimeter. For three users the polyhedron is emitted as a
//! vertex list (decoding-order corner points over every nonempty subset
//! of users, i.e. the corners and their coordinate-plane projections)
//! plus one facet row per subset inequality, with the facet's indicator
//! coefficients and bound.
//!
//! Output is tab-delimited text with one header line; numbers carry 10
//! significant digits, and cells that do not apply to a row kind hold
//! `NaN`.

use std::path::{Path, PathBuf};

use serde::Serialize;

use macfeas_core::capacity::{
    capacity_of_subset, check_feasibility_bruteforce, ChannelConfig, RateVector, SubsetMask,
};
use macfeas_core::queueing::required_rate_vector;

use crate::scenario::ScenarioFile;

#[derive(Debug, Clone, Serialize)]
pub struct RegionSummary {
    pub command: &'static str,
    pub out_path: PathBuf,
    pub user_count: usize,
    pub vertex_rows: usize,
    pub facet_rows: usize,
    pub sample_rows: usize,
    /// Whether the required-rate point lies inside the emitted region.
    pub point_feasible: bool,
}

fn fmt10(value: f64) -> String {
    format!("{value:.9e}")
}

pub fn run_region(
    scenario: &ScenarioFile,
    resolution: usize,
    out: &Path,
) -> anyhow::Result<RegionSummary> {
    let n = scenario.user_count();
    if n != 2 && n != 3 {
        anyhow::bail!("region emission supports 2 or 3 users, got {n}");
    }
    let cfg = scenario.channel_config()?;
    let demands = scenario.demands()?;
    let rates = required_rate_vector(&demands)?;
    let verdict = check_feasibility_bruteforce(&cfg, &rates)?;

    let (content, vertex_rows, facet_rows, sample_rows) = match n {
        2 => emit_two_users(&cfg, &rates, resolution),
        _ => emit_three_users(&cfg, &rates),
    };
    std::fs::write(out, content)?;

    Ok(RegionSummary {
        command: "region",
        out_path: out.to_path_buf(),
        user_count: n,
        vertex_rows,
        facet_rows,
        sample_rows,
        point_feasible: verdict.feasible,
    })
}

/// Pentagon vertices in boundary order, deduplicated when the region
/// degenerates (zero powers collapse everything onto the origin).
fn two_user_vertices(cfg: &ChannelConfig) -> Vec<[f64; 2]> {
    let g1 = capacity_of_subset(cfg, SubsetMask::singleton(0));
    let g2 = capacity_of_subset(cfg, SubsetMask::singleton(1));
    let g12 = capacity_of_subset(cfg, SubsetMask::full(2));
    let candidates = [
        [0.0, 0.0],
        [g1, 0.0],
        [g1, g12 - g1],
        [g12 - g2, g2],
        [0.0, g2],
    ];
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    for v in candidates {
        if !vertices.contains(&v) {
            vertices.push(v);
        }
    }
    vertices
}

fn emit_two_users(
    cfg: &ChannelConfig,
    rates: &RateVector,
    resolution: usize,
) -> (String, usize, usize, usize) {
    let vertices = two_user_vertices(cfg);
    let mut out = String::from("kind\tlabel\tr1_bps\tr2_bps\n");
    for (i, v) in vertices.iter().enumerate() {
        out.push_str(&format!(
            "vertex\tv{}\t{}\t{}\n",
            i,
            fmt10(v[0]),
            fmt10(v[1])
        ));
    }

    // Optional densified boundary: `resolution` points spaced uniformly
    // by arc length around the closed polygon.
    let mut sample_rows = 0;
    if resolution > 0 && vertices.len() > 1 {
        let mut cycle = vertices.clone();
        cycle.push(vertices[0]);
        let lengths: Vec<f64> = cycle
            .windows(2)
            .map(|e| ((e[1][0] - e[0][0]).powi(2) + (e[1][1] - e[0][1]).powi(2)).sqrt())
            .collect();
        let perimeter: f64 = lengths.iter().sum();
        if perimeter > 0.0 {
            for k in 0..resolution {
                let mut target = perimeter * k as f64 / resolution as f64;
                let mut edge = 0;
                while edge < lengths.len() - 1 && target > lengths[edge] {
                    target -= lengths[edge];
                    edge += 1;
                }
                let t = if lengths[edge] > 0.0 {
                    (target / lengths[edge]).min(1.0)
                } else {
                    0.0
                };
                let (a, b) = (cycle[edge], cycle[edge + 1]);
                let x = a[0] + t * (b[0] - a[0]);
                let y = a[1] + t * (b[1] - a[1]);
                out.push_str(&format!("sample\ts{k}\t{}\t{}\n", fmt10(x), fmt10(y)));
                sample_rows += 1;
            }
        }
    }

    let r = rates.as_slice();
    out.push_str(&format!(
        "point\trequired\t{}\t{}\n",
        fmt10(r[0]),
        fmt10(r[1])
    ));
    (out, vertices.len(), 0, sample_rows)
}

fn emit_three_users(cfg: &ChannelConfig, rates: &RateVector) -> (String, usize, usize, usize) {
    let mut out = String::from("kind\tlabel\tr1_bps\tr2_bps\tr3_bps\tbound_bps\n");

    // Corner points: marginal-gain vertices for every ordering of every
    // nonempty subset (proper subsets give the coordinate projections),
    // plus the origin. Deduplicate exact repeats.
    let mut vertices: Vec<(String, [f64; 3])> = vec![("origin".to_string(), [0.0; 3])];
    for bits in 1u64..8 {
        let members: Vec<usize> = SubsetMask::from_bits(bits).members().collect();
        for order in permutations(&members) {
            let mut coords = [0.0; 3];
            let mut prefix = SubsetMask::EMPTY;
            let mut previous = 0.0;
            for &user in &order {
                prefix = prefix.with(user);
                let value = capacity_of_subset(cfg, prefix);
                coords[user] = value - previous;
                previous = value;
            }
            let label = format!(
                "order={}",
                order
                    .iter()
                    .map(|u| (u + 1).to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            );
            if !vertices.iter().any(|(_, c)| c == &coords) {
                vertices.push((label, coords));
            }
        }
    }
    for (label, c) in &vertices {
        out.push_str(&format!(
            "vertex\t{label}\t{}\t{}\t{}\tNaN\n",
            fmt10(c[0]),
            fmt10(c[1]),
            fmt10(c[2])
        ));
    }

    // One facet per subset inequality: indicator coefficients and bound,
    // i.e. the half-space sum_i coeff_i * R_i <= bound.
    let mut facet_rows = 0;
    for bits in 1u64..8 {
        let s = SubsetMask::from_bits(bits);
        let bound = capacity_of_subset(cfg, s);
        let coeff = |i: usize| if s.contains(i) { 1.0 } else { 0.0 };
        out.push_str(&format!(
            "facet\tS={}\t{}\t{}\t{}\t{}\n",
            s,
            fmt10(coeff(0)),
            fmt10(coeff(1)),
            fmt10(coeff(2)),
            fmt10(bound)
        ));
        facet_rows += 1;
    }

    let r = rates.as_slice();
    out.push_str(&format!(
        "point\trequired\t{}\t{}\t{}\tNaN\n",
        fmt10(r[0]),
        fmt10(r[1]),
        fmt10(r[2])
    ));
    (out, vertices.len(), facet_rows, 0)
}

fn permutations(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 1 {
        return vec![items.to_vec()];
    }
    let mut result = Vec::new();
    for (i, &head) in items.iter().enumerate() {
        let mut rest: Vec<usize> = items.to_vec();
        rest.remove(i);
        for mut tail in permutations(&rest) {
            tail.insert(0, head);
            result.push(tail);
        }
    }
    result
}

impl RegionSummary {
    pub fn render_text(&self) -> String {
        format!(
            "region: {} users, {} vertices, {} facets, {} samples -> {}\n\
             required-rate point is {} the region\n",
            self.user_count,
            self.vertex_rows,
            self.facet_rows,
            self.sample_rows,
            self.out_path.display(),
            if self.point_feasible {
                "inside"
            } else {
                "outside"
            },
        )
    }
}
