//! Bound tables, the `log2` curve comparison and its plot script.

use std::fmt::Write as _;

use crate::bounds::{
    gv_lower, gv_lower_lattice, lsb, lsb_windowed, projective_singleton, BoundError, BoundParams,
    BoundReport, Family,
};
use crate::counting::{gaussian_pascal, log2_4dp, BigNat};
use crate::families::{build_powerset_lattice_with, build_projective_lattice_with, Caps};
use crate::lattice::Lattice;
use crate::oracle::{max_code, Budget, SearchProblem};

pub const BOUNDS_HEADER: &str = "family,q,n,d,m,M,lsb,lsb_log2,gv_lower,gv_lower_log2,oracle_max";

pub const FIG5_HEADER: &str = "n,lsb,lsb_log2,gv_lower,gv_lower_log2";

pub const OVERLAY_HEADER: &str = "label,n,log2_size";

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(ToString::to_string).unwrap_or_default()
}

fn log2_cell(v: &BigNat) -> String {
    log2_4dp(v).unwrap_or_default()
}

pub fn bounds_csv_row(r: &BoundReport) -> String {
    let upper = r.upper();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        r.family,
        opt(&r.q),
        r.n,
        r.d,
        opt(&r.window.map(|w| w.0)),
        opt(&r.window.map(|w| w.1)),
        upper,
        log2_cell(upper),
        opt(&r.gv_lower),
        r.gv_lower.as_ref().map(log2_cell).unwrap_or_default(),
        opt(&r.oracle_max),
    )
}

pub fn bounds_csv(rows: &[BoundReport]) -> String {
    let mut out = String::from(BOUNDS_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&bounds_csv_row(r));
        out.push('\n');
    }
    out
}

/// Closed-form families usable in a bound table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFamily {
    Powerset,
    Projective { q: u64 },
}

#[derive(Clone, Debug)]
pub struct TableSpec {
    pub family: TableFamily,
    pub n_range: std::ops::RangeInclusive<usize>,
    pub d_range: std::ops::RangeInclusive<usize>,
    pub window: Option<(usize, usize)>,
    /// Also run the exact search where the lattice can be materialized.
    pub with_oracle: bool,
    pub caps: Caps,
    pub budget: Budget,
}

/// One row per `(n, d)`. Combinations with no defined bound (puncture budget
/// above `n`, window outside `[0, n]`) are skipped.
pub fn bound_table(spec: &TableSpec) -> Vec<BoundReport> {
    let mut rows = Vec::new();
    for n in spec.n_range.clone() {
        for d in spec.d_range.clone() {
            if let Ok(row) = bound_row(spec, n, d) {
                rows.push(row);
            }
        }
    }
    rows
}

pub fn bound_row(spec: &TableSpec, n: usize, d: usize) -> Result<BoundReport, BoundError> {
    let (params, family) = match spec.family {
        TableFamily::Powerset => (BoundParams::powerset(n, d)?, Family::Powerset),
        TableFamily::Projective { q } => {
            (BoundParams::projective(q, n, d)?, Family::Projective { q })
        }
    };
    let lsb_windowed = spec
        .window
        .map(|(m, max)| lsb_windowed(&params, m, max))
        .transpose()?;
    let gv = gv_lower(family, n, d, spec.window, &spec.caps).ok();
    let oracle_max = if spec.with_oracle {
        oracle_value(spec, n, d)
    } else {
        None
    };
    Ok(BoundReport {
        family: family.label().to_string(),
        q: family.q(),
        n,
        d,
        window: spec.window,
        lsb: lsb(&params),
        lsb_windowed,
        gv_lower: gv,
        oracle_max,
    })
}

fn oracle_value(spec: &TableSpec, n: usize, d: usize) -> Option<BigNat> {
    let lattice = match spec.family {
        TableFamily::Powerset => build_powerset_lattice_with(n, &spec.caps).ok()?,
        TableFamily::Projective { q } => {
            build_projective_lattice_with(n, u32::try_from(q).ok()?, &spec.caps)
                .ok()?
                .lattice
        }
    };
    let mut problem = SearchProblem::new(&lattice, d).with_budget(spec.budget);
    problem.window = spec.window;
    let result = max_code(&problem).ok()?;
    result
        .proven_optimal
        .then(|| BigNat::from(result.best_size))
}

/// Bound row for an explicitly given modular lattice.
pub fn explicit_bound_row(
    lattice: &Lattice,
    d: usize,
    window: Option<(usize, usize)>,
    with_oracle: bool,
    budget: Budget,
) -> Result<BoundReport, BoundError> {
    let params = BoundParams::explicit(lattice, d)?;
    let lsb_windowed = window
        .map(|(m, max)| lsb_windowed(&params, m, max))
        .transpose()?;
    let oracle_max = if with_oracle {
        let mut problem = SearchProblem::new(lattice, d).with_budget(budget);
        problem.window = window;
        max_code(&problem)
            .ok()
            .filter(|r| r.proven_optimal)
            .map(|r| BigNat::from(r.best_size))
    } else {
        None
    };
    Ok(BoundReport {
        family: "explicit".to_string(),
        q: None,
        n: params.n,
        d,
        window,
        lsb: lsb(&params),
        lsb_windowed,
        gv_lower: gv_lower_lattice(lattice, d, window).ok(),
        oracle_max,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fig5Row {
    pub n: usize,
    pub lsb: BigNat,
    pub gv_lower: Option<BigNat>,
}

/// Projective bound curve over `n_range` for fixed `q` and `d`, with the
/// GV-type lower bound wherever `Sub(F_q^n)` can be materialized.
pub fn fig5_rows(
    q: u64,
    d: usize,
    n_range: std::ops::RangeInclusive<usize>,
    caps: &Caps,
) -> Result<Vec<Fig5Row>, BoundError> {
    n_range
        .map(|n| {
            Ok(Fig5Row {
                n,
                lsb: projective_singleton(n, d, q)?,
                gv_lower: gv_lower(Family::Projective { q }, n, d, None, caps).ok(),
            })
        })
        .collect()
}

/// The same curve through the q-Pascal recurrence instead of the product
/// formula.
pub fn fig5_lsb_via_pascal(q: u64, d: usize, n: usize) -> BigNat {
    let top = (n - (d - 1) / 2) as u64;
    (0..=top).map(|k| gaussian_pascal(top, k, q)).sum()
}

pub fn fig5_csv(rows: &[Fig5Row]) -> String {
    let mut out = String::from(FIG5_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            r.n,
            r.lsb,
            log2_cell(&r.lsb),
            opt(&r.gv_lower),
            r.gv_lower.as_ref().map(log2_cell).unwrap_or_default()
        );
    }
    out
}

/// Gnuplot script drawing the curves from `csv_name` and, for each overlay
/// label, the points from `overlay_name`.
pub fn fig5_plot_script(
    q: u64,
    d: usize,
    csv_name: &str,
    overlay: Option<(&str, &[String])>,
) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# gnuplot script; run with `gnuplot -p <this file>`");
    let _ = writeln!(s, "set datafile separator \",\"");
    let _ = writeln!(s, "set key left top");
    let _ = writeln!(s, "set grid");
    let _ = writeln!(s, "set xlabel \"n\"");
    let _ = writeln!(s, "set ylabel \"log2 code size\"");
    let _ = writeln!(
        s,
        "set title \"Subspace codes over F_{q}, minimum distance {d}\""
    );
    let mut clauses = vec![
        format!(
            "\"{csv_name}\" every ::1 using 1:3 with linespoints title \"Lattice Singleton bound\""
        ),
        format!(
            "\"{csv_name}\" every ::1 using 1:5 with points pt 6 title \"GV-type lower bound\""
        ),
    ];
    if let Some((file, labels)) = overlay {
        for label in labels {
            let escaped = label.replace('"', "\\\"");
            clauses.push(format!(
                "\"{file}\" every ::1 using 2:(strcol(1) eq \"{escaped}\" ? $3 : NaN) with points title \"{escaped}\""
            ));
        }
    }
    let _ = writeln!(s, "plot {}", clauses.join(", \\\n     "));
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projective_window_row() {
        let spec = TableSpec {
            family: TableFamily::Projective { q: 2 },
            n_range: 4..=4,
            d_range: 4..=4,
            window: Some((2, 2)),
            with_oracle: true,
            caps: Caps::default(),
            budget: Budget::default(),
        };
        let rows = bound_table(&spec);
        assert_eq!(rows.len(), 1);
        let r = &rows[0];
        assert_eq!(r.upper(), &BigNat::from(7u32));
        assert_eq!(r.oracle_max, Some(BigNat::from(5u32)));
        assert!(r.sandwich_holds());
        let line = bounds_csv_row(r);
        assert!(line.starts_with("projective,2,4,4,2,2,7,2.8074,"), "{line}");
    }

    #[test]
    fn powerset_row() {
        let spec = TableSpec {
            family: TableFamily::Powerset,
            n_range: 7..=7,
            d_range: 3..=3,
            window: None,
            with_oracle: false,
            caps: Caps::default(),
            budget: Budget::default(),
        };
        // GV: ceil(128 / (1 + 7 + 21)) = 5
        let csv = bounds_csv(&bound_table(&spec));
        assert_eq!(
            csv,
            format!("{BOUNDS_HEADER}\npowerset,,7,3,,,32,5.0000,5,2.3219,\n")
        );
    }

    #[test]
    fn skips_undefined_rows() {
        let spec = TableSpec {
            family: TableFamily::Powerset,
            n_range: 2..=2,
            d_range: 1..=6,
            window: None,
            with_oracle: false,
            caps: Caps::default(),
            budget: Budget::default(),
        };
        assert_eq!(bound_table(&spec).len(), 3);
    }

    #[test]
    fn fig5_default_curve() {
        let rows = fig5_rows(2, 4, 4..=20, &Caps::default()).unwrap();
        assert_eq!(rows.len(), 17);
        assert!(rows[0].gv_lower.is_some());
        assert!(rows[1].gv_lower.is_none());
        for w in rows.windows(2) {
            assert!(w[0].lsb < w[1].lsb);
        }
        for r in &rows {
            assert_eq!(r.lsb, fig5_lsb_via_pascal(2, 4, r.n));
        }
        let csv = fig5_csv(&rows);
        assert_eq!(csv.lines().count(), 18);
        assert!(csv.lines().nth(1).unwrap().starts_with("4,16,4.0000,"));
    }

    #[test]
    fn plot_script_mentions_overlay_labels() {
        let labels = vec!["EtzSilb".to_string()];
        let s = fig5_plot_script(2, 4, "fig5.csv", Some(("fig5_overlay.csv", &labels)));
        assert!(s.contains("fig5_overlay.csv"));
        assert!(s.contains("\"EtzSilb\""));
        assert!(s.starts_with("# gnuplot"));
    }
}
