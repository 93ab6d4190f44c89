use std::fmt::Write;

use super::trace::{Residual, ReductionTrace};
use crate::gammafn::HalfInt;

fn param(symbol: &str, offset: HalfInt) -> String {
    match offset.twice() {
        0 => symbol.to_string(),
        t if t < 0 => format!("{symbol} − {}", offset.abs()),
        _ => format!("{symbol} + {offset}"),
    }
}

fn residual_text(r: &Residual, has_beta: bool) -> String {
    if r.size == 0 {
        return "none".to_string();
    }
    let mut s = format!("size {}, {}", r.size, param("α", r.alpha_offset));
    if has_beta {
        s.push_str(&format!(", {}", param("β", r.beta_offset)));
    }
    s
}

/// Human-readable trace. With `audit`, each move's uncancelled factors are
/// listed as well.
pub fn render_text(trace: &ReductionTrace, audit: bool) -> String {
    let has_beta = trace.family.has_beta();
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}  p = {}  schedule {:?}  method {}",
        trace.family, trace.p, trace.schedule, trace.method
    );
    let _ = writeln!(out, "integral: {}", trace.family.integral());
    for step in &trace.steps {
        let _ = writeln!(
            out,
            "step {}: eliminate {} (size {} → {})",
            step.step_index, step.eliminated, step.size_before, step.residual.size
        );
        for m in &step.substitutions {
            let _ = writeln!(out, "  {:<14} {}", m.kind.name(), m.note);
            if audit {
                let _ = writeln!(out, "  {:<14}   = {}", "", m.factors);
            }
        }
        let _ = writeln!(out, "  contribution:  {}", step.contribution);
        let _ = writeln!(out, "  residual:      {}", residual_text(&step.residual, has_beta));
        if step.residual.size > 0 {
            let _ = writeln!(out, "  |X| exponent:  +{}", step.residual_exponent_shift);
        }
        let conds: Vec<String> = step.conditions.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "  requires:      {}", conds.join(", "));
    }
    let closed = trace.closed_form();
    let _ = writeln!(out, "total:         {}", trace.total);
    let _ = writeln!(out, "closed form:   {} = {}", trace.family.closed_form_symbol(trace.p), closed.normalized());
    let _ = writeln!(out, "match:         {}", if trace.matches_closed_form() { "yes" } else { "NO" });
    let conds: Vec<String> = trace.validity().iter().map(ToString::to_string).collect();
    let _ = writeln!(out, "valid for:     {}", conds.join(", "));
    out
}
