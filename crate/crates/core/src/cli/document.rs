//! Output documents and their three renderings.

use super::format::{json_number, sig, symbolic};
use serde_json::{Map, Value};
use std::fmt::Write as _;

pub const JSON_DIGITS: usize = 12;
pub const MARKDOWN_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Text(String),
    /// A probability; annotated when it has a recognized exact value.
    Prob(f64),
    Num(f64),
    Int(u64),
    Bool(bool),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    fn json(&self) -> Value {
        match self {
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Prob(x) | Cell::Num(x) => json_number(*x, JSON_DIGITS),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Empty => Value::Null,
        }
    }

    fn markdown(&self) -> String {
        match self {
            Cell::Text(s) => s.replace('|', "\\|"),
            Cell::Prob(x) => match symbolic(*x) {
                Some(s) => format!("{} ({s})", sig(*x, MARKDOWN_DIGITS)),
                None => sig(*x, MARKDOWN_DIGITS),
            },
            Cell::Num(x) => sig(*x, MARKDOWN_DIGITS),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
            Cell::Prob(x) | Cell::Num(x) => sig(*x, JSON_DIGITS),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Block {
    Table {
        id: &'static str,
        title: String,
        columns: Vec<&'static str>,
        rows: Vec<Vec<Cell>>,
    },
    Fields {
        id: &'static str,
        title: String,
        fields: Vec<(String, Cell)>,
    },
}

impl Block {
    pub fn table(id: &'static str, title: impl Into<String>, columns: Vec<&'static str>) -> Self {
        Block::Table {
            id,
            title: title.into(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn fields(id: &'static str, title: impl Into<String>) -> Self {
        Block::Fields {
            id,
            title: title.into(),
            fields: Vec::new(),
        }
    }

    pub fn row(mut self, row: Vec<Cell>) -> Self {
        if let Block::Table { columns, rows, .. } = &mut self {
            assert_eq!(row.len(), columns.len(), "row width");
            rows.push(row);
        }
        self
    }

    pub fn field(mut self, key: impl Into<String>, value: Cell) -> Self {
        if let Block::Fields { fields, .. } = &mut self {
            fields.push((key.into(), value));
        }
        self
    }

    pub fn id(&self) -> &'static str {
        match self {
            Block::Table { id, .. } | Block::Fields { id, .. } => id,
        }
    }
}

/// Adds `<key>_exact` next to every recognized probability.
fn insert_with_symbol(obj: &mut Map<String, Value>, key: &str, cell: &Cell) {
    obj.insert(key.to_owned(), cell.json());
    if let Cell::Prob(x) = cell {
        obj.insert(
            format!("{key}_exact"),
            symbolic(*x).map_or(Value::Null, |s| Value::String(s.into())),
        );
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Metadata {
    pub config_sha256: String,
    pub seed: Option<u64>,
    pub version: &'static str,
    /// Seconds since the Unix epoch, present only with `--stamp`.
    pub generated_at: Option<u64>,
}

impl Metadata {
    fn pairs(&self) -> Vec<(&'static str, Value)> {
        let mut v = vec![
            ("config_sha256", Value::String(self.config_sha256.clone())),
            ("seed", self.seed.map_or(Value::Null, Value::from)),
            ("version", Value::String(self.version.into())),
        ];
        if let Some(t) = self.generated_at {
            v.push(("generated_at_unix", Value::from(t)));
        }
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputDocument {
    pub format: Format,
    pub command: &'static str,
    pub metadata: Metadata,
    pub blocks: Vec<Block>,
}

impl OutputDocument {
    pub fn block(&self, id: &str) -> Option<&Block> {
        self.blocks.iter().find(|b| b.id() == id)
    }

    pub fn render(&self) -> String {
        match self.format {
            Format::Json => self.to_json(),
            Format::Csv => self.to_csv(),
            Format::Markdown => self.to_markdown(),
        }
    }

    pub fn to_json_value(&self) -> Value {
        let mut payload = Map::new();
        for b in &self.blocks {
            let v = match b {
                Block::Table { columns, rows, .. } => Value::Array(
                    rows.iter()
                        .map(|r| {
                            let mut o = Map::new();
                            for (c, cell) in columns.iter().zip(r) {
                                insert_with_symbol(&mut o, c, cell);
                            }
                            Value::Object(o)
                        })
                        .collect(),
                ),
                Block::Fields { fields, .. } => {
                    let mut o = Map::new();
                    for (k, cell) in fields {
                        insert_with_symbol(&mut o, k, cell);
                    }
                    Value::Object(o)
                }
            };
            payload.insert(b.id().to_owned(), v);
        }
        let mut meta = Map::new();
        for (k, v) in self.metadata.pairs() {
            meta.insert(k.into(), v);
        }
        let mut doc = Map::new();
        doc.insert("command".into(), Value::String(self.command.into()));
        doc.insert("metadata".into(), Value::Object(meta));
        doc.insert("payload".into(), Value::Object(payload));
        Value::Object(doc)
    }

    fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_json_value()).expect("serializable");
        s.push('\n');
        s
    }

    /// First table of the document, preceded by `#` metadata lines.
    fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# command: {}\n", self.command));
        for (k, v) in self.metadata.pairs() {
            let v = match v {
                Value::String(s) => s,
                other => other.to_string(),
            };
            let _ = writeln!(out, "# {k}: {v}");
        }
        if let Some(Block::Table { columns, rows, .. }) = self.blocks.iter().find(|b| matches!(b, Block::Table { .. }))
        {
            out.push_str(&columns.join(","));
            out.push('\n');
            for r in rows {
                let cells: Vec<_> = r.iter().map(Cell::csv).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        out
    }

    fn to_markdown(&self) -> String {
        let mut out = format!("# friendly-wigner {}\n\n", self.command);
        for (k, v) in self.metadata.pairs() {
            let v = match v {
                Value::String(s) => s,
                other => other.to_string(),
            };
            let _ = writeln!(out, "- {k}: `{v}`");
        }
        for b in &self.blocks {
            match b {
                Block::Table {
                    title, columns, rows, ..
                } => {
                    let _ = write!(out, "\n## {title}\n\n| {} |\n", columns.join(" | "));
                    let _ = writeln!(out, "|{}", "---|".repeat(columns.len()));
                    for r in rows {
                        let cells: Vec<_> = r.iter().map(Cell::markdown).collect();
                        let _ = writeln!(out, "| {} |", cells.join(" | "));
                    }
                }
                Block::Fields { title, fields, .. } => {
                    let _ = write!(out, "\n## {title}\n\n");
                    for (k, v) in fields {
                        let _ = writeln!(out, "- {k}: {}", v.markdown());
                    }
                }
            }
        }
        out
    }
}
