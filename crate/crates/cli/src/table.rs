use ddl_core::report::format_real;

/// A CSV document: one `#` schema comment line, a header, then rows.
#[derive(Debug, Clone)]
pub struct Table {
    comment: String,
    header: String,
    rows: Vec<String>,
}

impl Table {
    pub fn new(comment: impl Into<String>, header: &str) -> Self {
        Self { comment: comment.into(), header: header.to_string(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: String) {
        self.rows.push(row);
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn render(&self) -> String {
        let mut out = format!("# {}\n{}\n", self.comment, self.header);
        for r in &self.rows {
            out.push_str(r);
            out.push('\n');
        }
        out
    }
}

/// Comma-joined [`format_real`] values.
pub fn reals(values: &[f64]) -> String {
    values.iter().map(|v| format_real(*v)).collect::<Vec<_>>().join(",")
}
