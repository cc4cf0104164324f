use super::{DataError, ImageRecord};

/// Joins labels as `a`, `a and b`, `a, b and c`.
pub fn join_labels(labels: &[String]) -> String {
    match labels {
        [] => String::new(),
        [only] => only.clone(),
        [init @ .., last] => format!("{} and {}", init.join(", "), last),
    }
}

/// Byte ranges of `{...}` slots; braces without a partner are literal text.
fn slots(template: &str) -> Vec<(usize, usize)> {
    let bytes = template.as_bytes();
    let mut out = Vec::new();
    let mut open = None;
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'{' => open = Some(i),
            b'}' => {
                if let Some(start) = open.take() {
                    out.push((start, i + 1));
                }
            }
            _ => {}
        }
    }
    out
}

/// Renders a caption from a template such as `"Dermoscopy image showing {disease}"`.
///
/// A single-slot template receives all labels joined by [`join_labels`]. A
/// template with several slots receives exactly one label per slot, in order.
pub fn build_prompt(record: &ImageRecord, template: &str) -> Result<String, DataError> {
    let slots = slots(template);
    let labels = &record.labels;
    let fills: Vec<String> = match (slots.len(), labels.len()) {
        (0, 0) => Vec::new(),
        (1, n) if n >= 1 => vec![join_labels(labels)],
        (s, n) if s == n && s > 1 => labels.clone(),
        (s, n) => return Err(DataError::SlotMismatch { slots: s, labels: n }),
    };

    let mut out = String::with_capacity(template.len() + 32);
    let mut last = 0;
    for ((start, end), fill) in slots.into_iter().zip(fills) {
        out.push_str(&template[last..start]);
        out.push_str(&fill);
        last = end;
    }
    out.push_str(&template[last..]);
    Ok(out)
}
