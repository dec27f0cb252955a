//! Run configuration embedded as `# key: value` lines in every output.

use std::path::Path;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunConfig {
    entries: Vec<(String, String)>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        let mut c = RunConfig::default();
        c.set("command", command);
        c.set("version", env!("CARGO_PKG_VERSION"));
        c
    }

    pub fn set(&mut self, key: &str, value: impl ToString) -> &mut Self {
        let value = value.to_string();
        match self.entries.iter_mut().find(|(k, _)| k == key) {
            Some(e) => e.1 = value,
            None => self.entries.push((key.to_string(), value)),
        }
        self
    }

    pub fn set_opt<T: ToString>(&mut self, key: &str, value: Option<T>) -> &mut Self {
        if let Some(v) = value {
            self.set(key, v);
        }
        self
    }

    pub fn set_path(&mut self, key: &str, path: &Path) -> &mut Self {
        self.set(key, path.display())
    }

    pub fn set_list<T: ToString>(&mut self, key: &str, values: &[T]) -> &mut Self {
        self.set(key, values.iter().map(ToString::to_string).collect::<Vec<_>>().join(","))
    }

    pub fn entries(&self) -> &[(String, String)] {
        &self.entries
    }

    pub fn header(&self) -> String {
        self.entries.iter().map(|(k, v)| format!("# {k}: {v}\n")).collect()
    }
}
