//! JSON instance and allocation files. Indices are 0-based.

use std::fmt;
use std::path::Path;

use mms_core::{Allocation, Bundle, Instance, Rational};
use serde::{Deserialize, Serialize};

/// A utility entry: a JSON integer, or a string holding an integer or `p/q`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Int(i64),
    Text(String),
}

impl Entry {
    pub fn from_rational(r: Rational) -> Entry {
        match i64::try_from(r.numer()) {
            Ok(v) if r.is_integer() => Entry::Int(v),
            _ => Entry::Text(r.to_string()),
        }
    }

    pub fn to_rational(&self) -> Result<Rational, String> {
        match self {
            Entry::Int(v) => Ok(Rational::from(*v)),
            Entry::Text(s) => s.trim().parse::<Rational>().map_err(|e| e.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub agents: usize,
    pub items: usize,
    pub utilities: Vec<Vec<Entry>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AllocationFile {
    pub bundles: Vec<Vec<usize>>,
}

/// Bad input: unreadable file, malformed JSON or inconsistent contents.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputError {
    pub path: String,
    pub position: Option<(usize, usize)>,
    pub message: String,
}

impl fmt::Display for InputError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            Some((line, column)) => write!(f, "{}:{line}:{column}: {}", self.path, self.message),
            None => write!(f, "{}: {}", self.path, self.message),
        }
    }
}

impl std::error::Error for InputError {}

fn input_error(path: &Path, message: impl Into<String>) -> InputError {
    InputError { path: path.display().to_string(), position: None, message: message.into() }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, InputError> {
    let text = std::fs::read_to_string(path).map_err(|e| input_error(path, e.to_string()))?;
    serde_json::from_str(&text).map_err(|e| InputError {
        path: path.display().to_string(),
        position: Some((e.line(), e.column())),
        message: e.to_string(),
    })
}

impl InstanceFile {
    pub fn from_instance(inst: &Instance) -> InstanceFile {
        InstanceFile {
            agents: inst.num_agents(),
            items: inst.num_items(),
            utilities: inst.rows().iter().map(|r| r.iter().copied().map(Entry::from_rational).collect()).collect(),
        }
    }

    pub fn to_instance(&self) -> Result<Instance, String> {
        if self.utilities.len() != self.agents {
            return Err(format!("\"agents\" is {} but \"utilities\" has {} rows", self.agents, self.utilities.len()));
        }
        let mut rows = Vec::with_capacity(self.agents);
        for (i, row) in self.utilities.iter().enumerate() {
            if row.len() != self.items {
                return Err(format!("row {i} has {} entries, expected {}", row.len(), self.items));
            }
            let parsed = row
                .iter()
                .enumerate()
                .map(|(j, e)| e.to_rational().map_err(|m| format!("utilities[{i}][{j}]: {m}")))
                .collect::<Result<Vec<_>, _>>()?;
            rows.push(parsed);
        }
        Instance::new(rows).map_err(|e| e.to_string())
    }
}

impl AllocationFile {
    pub fn from_allocation(alloc: &Allocation) -> AllocationFile {
        AllocationFile { bundles: alloc.bundles().iter().map(|b| b.items().to_vec()).collect() }
    }

    pub fn to_allocation(&self) -> Allocation {
        Allocation::new(self.bundles.iter().map(|b| b.iter().copied().collect::<Bundle>()).collect())
    }
}

pub fn read_instance(path: &Path) -> Result<Instance, InputError> {
    let file: InstanceFile = read_json(path)?;
    file.to_instance().map_err(|m| input_error(path, m))
}

/// Reads an allocation and checks it partitions the items of `inst` among its agents.
pub fn read_allocation(path: &Path, inst: &Instance) -> Result<Allocation, InputError> {
    let file: AllocationFile = read_json(path)?;
    // Duplicate indices inside one bundle would be silently merged by `Bundle`.
    let listed: usize = file.bundles.iter().map(Vec::len).sum();
    if listed != inst.num_items() {
        return Err(input_error(
            path,
            format!("bundles list {listed} item entries for an instance with {} items", inst.num_items()),
        ));
    }
    let alloc = file.to_allocation();
    alloc.validate_for(inst).map_err(|e| input_error(path, e.to_string()))?;
    Ok(alloc)
}

pub fn to_pretty_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("file types serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_round_trip() {
        let inst = Instance::new(vec![
            vec![Rational::from(3), Rational::new(-7, 2), Rational::ZERO],
            vec![Rational::new(1, 3), Rational::from(-1), Rational::from(i64::MAX)],
        ])
        .unwrap();
        let file = InstanceFile::from_instance(&inst);
        let json = to_pretty_json(&file);
        let back: InstanceFile = serde_json::from_str(&json).unwrap();
        assert_eq!(back, file);
        assert_eq!(back.to_instance().unwrap(), inst);
        assert!(json.contains("\"-7/2\""));
    }

    #[test]
    fn allocation_round_trip() {
        let alloc = Allocation::from_vecs(&[vec![2, 0], vec![], vec![1]]);
        let file = AllocationFile::from_allocation(&alloc);
        let back: AllocationFile = serde_json::from_str(&to_pretty_json(&file)).unwrap();
        assert_eq!(back.to_allocation(), alloc);
    }

    #[test]
    fn entries_accept_strings() {
        let file: InstanceFile =
            serde_json::from_str(r#"{"agents": 1, "items": 3, "utilities": [["4", "-6/4", 2]]}"#).unwrap();
        let inst = file.to_instance().unwrap();
        assert_eq!(inst.row(0), &[Rational::from(4), Rational::new(-3, 2), Rational::from(2)]);
    }

    #[test]
    fn shape_errors() {
        let file: InstanceFile = serde_json::from_str(r#"{"agents": 2, "items": 2, "utilities": [[1, 2]]}"#).unwrap();
        assert!(file.to_instance().unwrap_err().contains("1 rows"));
        let file: InstanceFile =
            serde_json::from_str(r#"{"agents": 1, "items": 2, "utilities": [[1, "1/0"]]}"#).unwrap();
        assert!(file.to_instance().unwrap_err().contains("utilities[0][1]"));
        assert!(serde_json::from_str::<InstanceFile>(r#"{"agents": 1, "items": 1, "utilities": [[1.5]]}"#).is_err());
    }
}
