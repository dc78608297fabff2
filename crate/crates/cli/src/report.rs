use std::fmt::Display;

/// Two-column markdown summary.
pub struct Report {
    title: String,
    rows: Vec<(String, String)>,
}

impl Report {
    pub fn new(cmd: &str) -> Self {
        Report {
            title: format!("prym {cmd}"),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, key: &str, value: impl Display) {
        self.rows.push((key.to_string(), value.to_string()));
    }

    pub fn markdown(&self) -> String {
        let mut s = format!("# {}\n\n| quantity | value |\n|---|---|\n", self.title);
        for (k, v) in &self.rows {
            s.push_str(&format!("| {k} | {} |\n", v.replace('|', "\\|")));
        }
        s
    }
}
