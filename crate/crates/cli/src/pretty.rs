//! Plain-text rendering of a JSON report: aligned `key  value` lines, and
//! column tables for arrays of flat objects.

use serde_json::Value;

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some("-".into()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(match n.as_f64() {
            Some(x) if n.is_f64() => format!("{x:.12}"),
            _ => n.to_string(),
        }),
        Value::String(s) => Some(s.clone()),
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        Value::Object(_) => None,
    }
}

fn is_flat(v: &Value) -> bool {
    matches!(v, Value::Object(m) if m.values().all(|x| scalar(x).is_some()))
}

fn table(rows: &[Value], indent: usize, out: &mut String) {
    let keys: Vec<&String> = match &rows[0] {
        Value::Object(m) => m.keys().collect(),
        _ => return,
    };
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| keys.iter().map(|k| scalar(&r[k.as_str()]).unwrap_or_default()).collect())
        .collect();
    let widths: Vec<usize> = keys
        .iter()
        .enumerate()
        .map(|(i, k)| cells.iter().map(|c| c[i].len()).max().unwrap_or(0).max(k.len()))
        .collect();
    let pad = " ".repeat(indent);
    let line = |vals: Vec<&str>| {
        let cols: Vec<String> = vals.iter().zip(&widths).map(|(v, w)| format!("{v:<w$}")).collect();
        format!("{pad}{}\n", cols.join("  ").trim_end())
    };
    out.push_str(&line(keys.iter().map(|k| k.as_str()).collect()));
    for c in &cells {
        out.push_str(&line(c.iter().map(String::as_str).collect()));
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let Value::Object(map) = v else {
        out.push_str(&format!("{}{}\n", " ".repeat(indent), scalar(v).unwrap_or_default()));
        return;
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    let pad = " ".repeat(indent);
    for (k, x) in map {
        match (scalar(x), x) {
            (Some(s), _) => out.push_str(&format!("{pad}{k:<width$}  {s}\n")),
            (None, Value::Array(rows)) if !rows.is_empty() && rows.iter().all(is_flat) => {
                out.push_str(&format!("{pad}{k}:\n"));
                table(rows, indent + 2, out);
            }
            (None, Value::Array(rows)) => {
                out.push_str(&format!("{pad}{k}:\n"));
                for r in rows {
                    render(r, indent + 2, out);
                }
            }
            (None, _) => {
                out.push_str(&format!("{pad}{k}:\n"));
                render(x, indent + 2, out);
            }
        }
    }
}

pub fn to_text(v: &Value) -> String {
    let mut out = String::new();
    render(v, 0, &mut out);
    out
}
