//! Plain-text rendering of JSON results for `--pretty`.

use serde_json::Value;

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            a.iter().map(scalar).collect::<Vec<_>>().join(", ")
        }
        // small records inside a cell, e.g. prime coefficients, as `2=x`
        Value::Array(a) if a.iter().all(Value::is_object) => a
            .iter()
            .map(|o| {
                o.as_object()
                    .into_iter()
                    .flat_map(|m| m.values())
                    .map(scalar)
                    .collect::<Vec<_>>()
                    .join("=")
            })
            .collect::<Vec<_>>()
            .join(", "),
        other => other.to_string(),
    }
}

fn table(rows: &[Value]) -> String {
    let mut cols: Vec<String> = Vec::new();
    for r in rows {
        for k in r.as_object().into_iter().flat_map(|o| o.keys()) {
            if !cols.contains(k) {
                cols.push(k.clone());
            }
        }
    }
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            cols.iter()
                .map(|c| r.get(c).map(scalar).unwrap_or_default())
                .collect()
        })
        .collect();
    let widths: Vec<usize> = cols
        .iter()
        .enumerate()
        .map(|(i, c)| {
            cells
                .iter()
                .map(|r| r[i].chars().count())
                .chain([c.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let line = |items: &[String]| {
        items
            .iter()
            .zip(&widths)
            .map(|(s, w)| format!("{s:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_string()
    };
    let mut out = vec![
        line(&cols),
        widths
            .iter()
            .map(|w| "-".repeat(*w))
            .collect::<Vec<_>>()
            .join("  "),
    ];
    out.extend(cells.iter().map(|r| line(r)));
    out.join("\n")
}

/// Objects become `key: value` lines, arrays of objects become tables.
pub fn render(v: &Value) -> String {
    match v {
        // a batch of per-level lists reads best as one table
        Value::Array(items) if !items.is_empty() && items.iter().any(Value::is_array) => {
            let flat: Vec<Value> = items
                .iter()
                .flat_map(|x| match x {
                    Value::Array(inner) => inner.clone(),
                    other => vec![other.clone()],
                })
                .collect();
            render(&Value::Array(flat))
        }
        Value::Array(items) if items.iter().all(Value::is_object) && !items.is_empty() => {
            table(items)
        }
        Value::Object(map) => {
            let width = map.keys().map(|k| k.len()).max().unwrap_or(0);
            map.iter()
                .map(|(k, v)| match v {
                    Value::Array(a) if a.iter().any(Value::is_object) => {
                        format!("{k}:\n{}", indent(&render(v), 2))
                    }
                    Value::Object(_) => format!("{k}:\n{}", indent(&render(v), 2)),
                    _ => format!("{k:<width$}  {}", scalar(v)),
                })
                .collect::<Vec<_>>()
                .join("\n")
        }
        other => scalar(other),
    }
}

fn indent(s: &str, n: usize) -> String {
    s.lines()
        .map(|l| format!("{}{l}", " ".repeat(n)))
        .collect::<Vec<_>>()
        .join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn renders_objects_and_tables() {
        let v = json!({"N": 11, "genus": 1});
        assert_eq!(render(&v), "N      11\ngenus  1");
        let t = render(&json!([{"a": 1, "b": "x"}, {"a": 22, "b": "y"}]));
        assert_eq!(t, "a   b\n--  -\n1   x\n22  y");
        let c = render(&json!([{"p": [{"p": 2, "value": "x"}, {"p": 3, "value": "-1"}]}]));
        assert!(c.ends_with("2=x, 3=-1"));
    }
}
