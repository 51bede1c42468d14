//! Plain-text renderings of registry audits and candidate windows.
//!
//! Reals are printed with six decimals. Rounding is applied to the exact
//! binary value of the float, with ties going to the even digit.

use std::fmt::Write as _;

use num_bigint::BigUint;

use crate::bounds::{exponent_lower_bound, CandidateWindow};
use crate::registry::AuditRow;

pub fn fmt_real(x: f64) -> String {
    format!("{x:.6}")
}

/// Left-aligned columns separated by two spaces, no trailing whitespace.
pub fn grid(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let mut out = String::new();
    let mut line = |cells: &mut dyn Iterator<Item = &str>| {
        let mut s = String::new();
        for (i, cell) in cells.enumerate() {
            if i > 0 {
                s.push_str("  ");
            }
            let pad = widths[i].saturating_sub(cell.chars().count());
            s.push_str(cell);
            s.extend(std::iter::repeat_n(' ', pad));
        }
        out.push_str(s.trim_end());
        out.push('\n');
    };
    line(&mut headers.iter().copied());
    let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
    line(&mut rule.iter().map(String::as_str));
    for row in rows {
        line(&mut row.iter().map(String::as_str));
    }
    out
}

/// Exponent `delta = log_r W` with its integer part for each exact value.
pub fn exponent_table(rows: &[AuditRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .filter(|r| r.exact)
        .map(|row| {
            let delta = fmt_real(row.delta);
            vec![
                row.r.to_string(),
                row.k.to_string(),
                row.n.to_string(),
                delta.clone(),
                format!("W({},{}) = {}", row.r, row.k, row.value),
                format!("{} = {}^{delta}", row.value, row.r),
                format!("{delta} in [{}, {})", row.n, row.n + 1),
            ]
        })
        .collect();
    grid(&["r", "k", "n", "delta", "value", "power form", "range"], &body)
}

/// Power-interval localization and the `W < r^(k^2)` condition for each
/// exact value. Logarithms are natural.
pub fn localization_table(rows: &[AuditRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .filter(|r| r.exact)
        .map(|row| {
            vec![
                row.r.to_string(),
                row.k.to_string(),
                fmt_real(row.sqrt_n_plus_1),
                row.n.to_string(),
                fmt_real(row.ln_r),
                fmt_real(row.ln_k),
                format!("{}^{} = {}", row.r, row.n, row.r_pow_n),
                row.value.to_string(),
                format!("{}^{} = {}", row.r, row.n + 1, row.r_pow_n_plus_1),
                format!("{}^{}", row.r, row.k_squared),
                row.condition.all_hold().to_string(),
            ]
        })
        .collect();
    grid(
        &["r", "k", "sqrt(n+1)", "n", "ln r", "ln k", "r^n", "W(r,k)", "r^(n+1)", "r^(k^2)", "W<r^(k^2)"],
        &body,
    )
}

/// Published lower bounds and the least exponent each one forces.
pub fn lower_bound_table(rows: &[AuditRow]) -> String {
    let body: Vec<Vec<String>> = rows
        .iter()
        .filter(|r| !r.exact)
        .map(|row| {
            let n_min = exponent_lower_bound(&row.value, &BigUint::from(row.r))
                .map_or_else(|e| e.to_string(), |n| n.to_string());
            vec![
                row.r.to_string(),
                row.k.to_string(),
                format!("W({},{}) > {}", row.r, row.k, row.value),
                fmt_real(row.delta),
                n_min,
                row.source.clone(),
            ]
        })
        .collect();
    grid(&["r", "k", "bound", "log_r bound", "n >=", "source"], &body)
}

pub fn tables(rows: &[AuditRow]) -> String {
    let mut out = String::new();
    out.push_str("Exponents (logarithms to base r)\n\n");
    out.push_str(&exponent_table(rows));
    out.push_str("\nLocalization (natural logarithms)\n\n");
    out.push_str(&localization_table(rows));
    if rows.iter().any(|r| !r.exact) {
        out.push_str("\nLower bounds\n\n");
        out.push_str(&lower_bound_table(rows));
    }
    out
}

pub fn window_text(window: &CandidateWindow) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "base {} exponents {}..={}: {} intervals covering [{}, {})",
        window.base,
        window.n_min,
        window.n_max,
        window.len(),
        window.global_lower,
        window.global_upper
    );
    for interval in &window.intervals {
        let _ = writeln!(
            out,
            "n={:<3} [{}^{}, {}^{}) = {}",
            interval.exponent(),
            window.base,
            interval.exponent(),
            window.base,
            interval.exponent() + 1,
            interval
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bounds::enumerate_candidate_intervals;
    use crate::registry;

    #[test]
    fn reals_round_half_even_on_exact_values() {
        // 2^-7 = 0.0078125 and 3 * 2^-7 = 0.0234375 are exact ties
        assert_eq!(fmt_real(0.0078125), "0.007812");
        assert_eq!(fmt_real(0.0234375), "0.023438");
        assert_eq!(fmt_real(2.5), "2.500000");
        assert_eq!(fmt_real(1132f64.log2()), "10.144658");
    }

    #[test]
    fn grid_alignment() {
        let text = grid(&["a", "bb"], &[vec!["123".into(), "x".into()]]);
        assert_eq!(text, "a    bb\n---  --\n123  x\n");
    }

    #[test]
    fn window_lines() {
        let w = enumerate_candidate_intervals(&BigUint::from(2u32), 11, 12).unwrap();
        assert_eq!(
            window_text(&w),
            "base 2 exponents 11..=12: 2 intervals covering [2048, 8192)\n\
             n=11  [2^11, 2^12) = [2048, 4096)\n\
             n=12  [2^12, 2^13) = [4096, 8192)\n"
        );
    }

    #[test]
    fn tables_cover_known_values() {
        let report = registry::audit(&registry::bundled().unwrap()).unwrap();
        let text = tables(&report.rows);
        assert!(text.contains("W(2,6) = 1132"));
        assert!(text.contains("1132 = 2^10.144658"));
        assert!(text.contains("3.316625"));
        assert!(text.contains("W(2,7) > 3703"));
        assert_eq!(text, tables(&report.rows));
    }
}
