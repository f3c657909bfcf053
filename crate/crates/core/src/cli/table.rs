//! CSV output with a fixed float format.

/// Shortest representation that round-trips, with `inf`, `-inf` and `nan`
/// spelled out. Magnitudes outside `[1e-5, 1e16)` use exponent notation.
pub fn format_f64(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let a = x.abs();
    if (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        for line in std::iter::once(&self.header).chain(&self.rows) {
            w.write_record(line).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("fields are UTF-8")
    }
}

/// Builder for one row, keyed by the table header.
pub struct Row<'a> {
    header: &'a [String],
    cells: Vec<String>,
}

impl<'a> Row<'a> {
    pub fn new(table: &'a Table) -> Self {
        Row {
            header: &table.header,
            cells: vec![String::new(); table.header.len()],
        }
    }

    pub fn set(&mut self, name: &str, value: impl Into<String>) {
        if let Some(k) = self.header.iter().position(|h| h == name) {
            self.cells[k] = value.into();
        }
    }

    pub fn num(&mut self, name: &str, value: f64) {
        self.set(name, format_f64(value));
    }

    pub fn opt(&mut self, name: &str, value: Option<f64>) {
        if let Some(v) = value {
            self.num(name, v);
        }
    }

    pub fn finish(self) -> Vec<String> {
        self.cells
    }
}
