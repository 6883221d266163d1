//! CSV ingestion: one-hot encoding, min-max normalization, facility
//! selection by a predicate on a raw attribute, and groups from the distinct
//! values (or bins) of another attribute.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, Metric, PointSet};

fn load_err(msg: impl Into<String>) -> Error {
    Error::Load(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Numeric,
    Categorical,
    /// Read (so it can drive the predicate or groups) but not encoded.
    Ignore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Comparator {
    #[serde(rename = "==")]
    Eq,
    #[serde(rename = "!=")]
    Ne,
    #[serde(rename = "<")]
    Lt,
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">")]
    Gt,
    #[serde(rename = ">=")]
    Ge,
}

impl fmt::Display for Comparator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Comparator::Eq => "==",
            Comparator::Ne => "!=",
            Comparator::Lt => "<",
            Comparator::Le => "<=",
            Comparator::Gt => ">",
            Comparator::Ge => ">=",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Predicate {
    pub attribute: String,
    pub op: Comparator,
    /// Compared numerically when the attribute is numeric, as a string
    /// otherwise (only `==` and `!=` are allowed on strings).
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupRule {
    pub attribute: String,
    /// Equal-frequency bins over the facilities' values (numeric only).
    #[serde(default)]
    pub bins: Option<usize>,
    /// Explicit cut points; bin `i` holds values in `[edges[i-1], edges[i])`.
    #[serde(default)]
    pub edges: Option<Vec<f64>>,
}

fn default_missing() -> Vec<String> {
    vec![String::new(), "?".into(), "NA".into()]
}

fn default_delimiter() -> char {
    ','
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TabularConfig {
    #[serde(default)]
    pub name: Option<String>,
    /// Relative paths are resolved against the config file's directory.
    pub source: PathBuf,
    #[serde(default = "default_delimiter")]
    pub delimiter: char,
    /// Cell values treated as missing (after trimming).
    #[serde(default = "default_missing")]
    pub missing: Vec<String>,
    /// Per-column type overrides; other columns are inferred (numeric when
    /// every present cell parses as a number).
    #[serde(default)]
    pub columns: BTreeMap<String, ColumnKind>,
    /// Rows matching this become facilities; all rows when absent.
    #[serde(default)]
    pub facility: Option<Predicate>,
    /// A single group of all facilities when absent.
    #[serde(default)]
    pub groups: Option<GroupRule>,
    pub k: usize,
    /// Zero requirements when absent.
    #[serde(default)]
    pub alpha: Option<Vec<usize>>,
    #[serde(default)]
    pub beta: Option<Vec<usize>>,
}

impl TabularConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path)
            .map_err(|e| load_err(format!("cannot read config {}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        if config.source.is_relative() {
            if let Some(dir) = path.parent() {
                config.source = dir.join(&config.source);
            }
        }
        Ok(config)
    }

    /// Default config for a file: every column inferred, every row a facility.
    pub fn for_source(source: impl Into<PathBuf>, k: usize) -> Self {
        Self {
            name: None,
            source: source.into(),
            delimiter: ',',
            missing: default_missing(),
            columns: BTreeMap::new(),
            facility: None,
            groups: None,
            k,
            alpha: None,
            beta: None,
        }
    }
}

/// Summary of a load: the per-dataset columns of the usual result
/// tables (n, d, n_c, n_f, group sizes).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub rows_read: usize,
    pub rows_dropped: usize,
    pub n: usize,
    pub d: usize,
    pub n_c: usize,
    pub n_f: usize,
    pub group_labels: Vec<String>,
    pub group_sizes: Vec<usize>,
    /// Names of the encoded coordinate columns, in order.
    pub features: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct TabularData {
    pub instance: Instance,
    pub provenance: Provenance,
}

impl TabularData {
    /// Writes the normalized coordinates as CSV. Loading that file with a
    /// default config reproduces the same coordinates.
    pub fn write_normalized(&self, path: impl AsRef<Path>) -> Result<()> {
        let Metric::Euclidean(points) = self.instance.metric() else {
            unreachable!("tabular instances are Euclidean")
        };
        let mut w = csv::Writer::from_path(path)?;
        w.write_record(&self.provenance.features)?;
        for i in 0..points.len() {
            w.write_record(points.point(i).iter().map(f64::to_string))?;
        }
        w.flush()?;
        Ok(())
    }
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn column(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| load_err(format!("unknown column `{name}`")))
    }
}

fn read_table(config: &TabularConfig) -> Result<Table> {
    let delimiter = u8::try_from(config.delimiter)
        .map_err(|_| load_err(format!("delimiter {:?} is not a single byte", config.delimiter)))?;
    let file = fs::File::open(&config.source)
        .map_err(|e| load_err(format!("cannot open {}: {e}", config.source.display())))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        rows.push(record.iter().map(str::to_string).collect());
    }
    Ok(Table { header, rows })
}

fn parse_num(s: &str) -> Option<f64> {
    s.parse::<f64>().ok().filter(|x| x.is_finite())
}

enum Encoded {
    Numeric(Vec<f64>),
    /// Sorted distinct values and each row's index into them.
    Categorical(Vec<String>, Vec<usize>),
}

pub fn load_tabular(config: &TabularConfig) -> Result<TabularData> {
    let table = read_table(config)?;
    let width = table.header.len();

    for name in config.columns.keys() {
        table.column(name)?;
    }
    let facility_col = config.facility.as_ref().map(|p| table.column(&p.attribute)).transpose()?;
    let group_col = config.groups.as_ref().map(|g| table.column(&g.attribute)).transpose()?;

    let kinds: Vec<Option<ColumnKind>> = table
        .header
        .iter()
        .map(|h| config.columns.get(h).copied())
        .collect();
    let used = |c: usize| {
        kinds[c] != Some(ColumnKind::Ignore) || Some(c) == facility_col || Some(c) == group_col
    };

    let is_missing = |s: &str| config.missing.iter().any(|m| m == s);
    let rows_read = table.rows.len();
    let rows: Vec<&Vec<String>> = table
        .rows
        .iter()
        .filter(|r| r.len() == width && (0..width).all(|c| !used(c) || !is_missing(&r[c])))
        .collect();
    let rows_dropped = rows_read - rows.len();
    if rows_dropped > 0 {
        log::info!("dropped {rows_dropped} of {rows_read} rows with missing values");
    }
    if rows.is_empty() {
        return Err(load_err("no complete rows"));
    }

    // Types: explicit override, else numeric iff every cell parses.
    let numeric: Vec<bool> = (0..width)
        .map(|c| match kinds[c] {
            Some(ColumnKind::Numeric) => true,
            Some(ColumnKind::Categorical) => false,
            _ => rows.iter().all(|r| parse_num(&r[c]).is_some()),
        })
        .collect();

    let mut features = Vec::new();
    let mut columns: Vec<Vec<f64>> = Vec::new();
    for c in 0..width {
        if kinds[c] == Some(ColumnKind::Ignore) {
            continue;
        }
        match encode(&table.header[c], c, numeric[c], &rows)? {
            Encoded::Numeric(values) => {
                features.push(table.header[c].clone());
                columns.push(values);
            }
            Encoded::Categorical(levels, codes) => {
                for (l, level) in levels.iter().enumerate() {
                    features.push(format!("{}={level}", table.header[c]));
                    columns.push(codes.iter().map(|&x| f64::from(u8::from(x == l))).collect());
                }
            }
        }
    }
    if columns.is_empty() {
        return Err(load_err("no feature columns left after encoding"));
    }
    for col in &mut columns {
        min_max(col);
    }

    let n = rows.len();
    let d = columns.len();
    let mut coords = Vec::with_capacity(n * d);
    for i in 0..n {
        coords.extend(columns.iter().map(|col| col[i]));
    }
    let points = PointSet::from_flat(d, coords)?;

    let facilities: Vec<usize> = match (&config.facility, facility_col) {
        (Some(p), Some(c)) => {
            let mut out = Vec::new();
            for (i, r) in rows.iter().enumerate() {
                if matches(p, &r[c], numeric[c])? {
                    out.push(i);
                }
            }
            out
        }
        _ => (0..n).collect(),
    };
    if facilities.is_empty() {
        return Err(load_err("the facility predicate selects no rows"));
    }

    let (group_labels, groups) = match (&config.groups, group_col) {
        (Some(rule), Some(c)) => make_groups(rule, c, numeric[c], &rows, &facilities)?,
        _ => (vec!["all".to_string()], vec![facilities.clone()]),
    };
    let t = groups.len();
    let alpha = config.alpha.clone().unwrap_or_else(|| vec![0; t]);
    if alpha.len() != t {
        return Err(load_err(format!(
            "alpha has {} entries but the grouping produced {t} groups ({})",
            alpha.len(),
            group_labels.join(", ")
        )));
    }
    for (g, (&a, members)) in alpha.iter().zip(&groups).enumerate() {
        if a > members.len() {
            return Err(load_err(format!(
                "group `{}` has {} facilities but alpha[{g}] = {a}",
                group_labels[g],
                members.len()
            )));
        }
    }

    let provenance = Provenance {
        rows_read,
        rows_dropped,
        n,
        d,
        n_c: n,
        n_f: facilities.len(),
        group_labels,
        group_sizes: groups.iter().map(Vec::len).collect(),
        features,
    };
    let instance = Instance::new(
        Metric::Euclidean(points),
        (0..n).collect(),
        facilities,
        groups,
        alpha,
        config.beta.clone(),
        config.k,
    )?;
    Ok(TabularData { instance, provenance })
}

fn encode(name: &str, c: usize, numeric: bool, rows: &[&Vec<String>]) -> Result<Encoded> {
    if numeric {
        let values = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                parse_num(&r[c]).ok_or_else(|| {
                    load_err(format!("column `{name}` row {}: `{}` is not a number", i + 1, r[c]))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        return Ok(Encoded::Numeric(values));
    }
    let levels: Vec<String> = rows
        .iter()
        .map(|r| r[c].clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let codes = rows
        .iter()
        .map(|r| levels.binary_search(&r[c]).unwrap())
        .collect();
    Ok(Encoded::Categorical(levels, codes))
}

/// Maps a column onto `[0, 1]`; constant columns become all zeros.
fn min_max(col: &mut [f64]) {
    let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    for x in col.iter_mut() {
        *x = if span > 0.0 { (*x - lo) / span } else { 0.0 };
    }
}

fn matches(p: &Predicate, cell: &str, numeric: bool) -> Result<bool> {
    if numeric {
        let target = parse_num(&p.value).ok_or_else(|| {
            load_err(format!(
                "predicate value `{}` is not a number but `{}` is numeric",
                p.value, p.attribute
            ))
        })?;
        let x = parse_num(cell).ok_or_else(|| load_err(format!("`{cell}` is not a number")))?;
        return Ok(match p.op {
            Comparator::Eq => x == target,
            Comparator::Ne => x != target,
            Comparator::Lt => x < target,
            Comparator::Le => x <= target,
            Comparator::Gt => x > target,
            Comparator::Ge => x >= target,
        });
    }
    match p.op {
        Comparator::Eq => Ok(cell == p.value),
        Comparator::Ne => Ok(cell != p.value),
        op => Err(load_err(format!(
            "comparator `{op}` needs a numeric column but `{}` is categorical",
            p.attribute
        ))),
    }
}

fn make_groups(
    rule: &GroupRule,
    c: usize,
    numeric: bool,
    rows: &[&Vec<String>],
    facilities: &[usize],
) -> Result<(Vec<String>, Vec<Vec<usize>>)> {
    if rule.bins.is_some() && rule.edges.is_some() {
        return Err(load_err("give either `bins` or `edges` for a grouping, not both"));
    }
    let binned = rule.bins.is_some() || rule.edges.is_some();
    if binned && !numeric {
        return Err(load_err(format!(
            "`{}` is categorical and cannot be binned",
            rule.attribute
        )));
    }
    if !binned {
        // one group per distinct value among the facilities
        let mut by_value: Vec<(String, Vec<usize>)> = Vec::new();
        let mut index: BTreeMap<String, usize> = BTreeMap::new();
        for &f in facilities {
            let v = &rows[f][c];
            let g = *index.entry(v.clone()).or_insert_with(|| {
                by_value.push((v.clone(), Vec::new()));
                by_value.len() - 1
            });
            by_value[g].1.push(f);
        }
        if numeric {
            by_value.sort_by(|a, b| parse_num(&a.0).unwrap().total_cmp(&parse_num(&b.0).unwrap()));
        } else {
            by_value.sort_by(|a, b| a.0.cmp(&b.0));
        }
        return Ok(by_value.into_iter().unzip());
    }

    let values: Vec<f64> = facilities.iter().map(|&f| parse_num(&rows[f][c]).unwrap()).collect();
    let edges = match (&rule.edges, rule.bins) {
        (Some(edges), _) => {
            if edges.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(load_err("bin edges must be strictly increasing"));
            }
            edges.clone()
        }
        (None, Some(bins)) => quantile_edges(&values, bins)?,
        (None, None) => unreachable!(),
    };
    let mut groups = vec![Vec::new(); edges.len() + 1];
    for (&f, &x) in facilities.iter().zip(&values) {
        groups[edges.partition_point(|&e| e <= x)].push(f);
    }
    let mut labels = Vec::with_capacity(groups.len());
    for b in 0..groups.len() {
        let lo = if b == 0 { "-inf".to_string() } else { edges[b - 1].to_string() };
        let hi = if b == edges.len() { "inf".to_string() } else { edges[b].to_string() };
        labels.push(format!("{}∈[{lo},{hi})", rule.attribute));
    }
    // empty bins would make alpha unsatisfiable and the group meaningless
    let (labels, groups): (Vec<String>, Vec<Vec<usize>>) =
        labels.into_iter().zip(groups).filter(|(_, g)| !g.is_empty()).unzip();
    Ok((labels, groups))
}

/// Cut points for `bins` equal-frequency bins. Ties can merge bins, so
/// fewer groups than requested may result.
fn quantile_edges(values: &[f64], bins: usize) -> Result<Vec<f64>> {
    if bins == 0 {
        return Err(load_err("bins must be positive"));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let m = sorted.len();
    let mut edges: Vec<f64> = (1..bins).map(|j| sorted[j * m / bins]).collect();
    edges.dedup();
    // a cut at the minimum leaves the first bin empty
    edges.retain(|&e| e > sorted[0]);
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_csv(text: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(text.as_bytes()).unwrap();
        f
    }

    #[test]
    fn one_hot_and_min_max() {
        let f = write_csv("x,color\n1,red\n3,blue\n2,red\n5,blue\n");
        let data = load_tabular(&TabularConfig::for_source(f.path(), 2)).unwrap();
        assert_eq!(data.provenance.d, 3);
        assert_eq!(data.provenance.features, vec!["x", "color=blue", "color=red"]);
        let Metric::Euclidean(ps) = data.instance.metric() else { unreachable!() };
        assert_eq!(ps.point(0), &[0.0, 0.0, 1.0]);
        assert_eq!(ps.point(3), &[1.0, 1.0, 0.0]);
        assert_eq!(ps.point(2)[0], 0.25);
    }

    #[test]
    fn constant_column_maps_to_zero() {
        let f = write_csv("a,b\n7,1\n7,2\n7,3\n");
        let data = load_tabular(&TabularConfig::for_source(f.path(), 1)).unwrap();
        let Metric::Euclidean(ps) = data.instance.metric() else { unreachable!() };
        assert!((0..3).all(|i| ps.point(i)[0] == 0.0));
    }

    #[test]
    fn missing_rows_are_dropped() {
        let f = write_csv("a,b\n1,2\n?,3\n4,\n5,6\n");
        let data = load_tabular(&TabularConfig::for_source(f.path(), 1)).unwrap();
        assert_eq!(data.provenance.rows_dropped, 2);
        assert_eq!(data.provenance.n, 2);
    }

    #[test]
    fn ignored_columns_may_be_missing() {
        let f = write_csv("id,a\n,1\n,2\n");
        let mut config = TabularConfig::for_source(f.path(), 1);
        config.columns.insert("id".into(), ColumnKind::Ignore);
        let data = load_tabular(&config).unwrap();
        assert_eq!(data.provenance.n, 2);
        assert_eq!(data.provenance.d, 1);
    }

    #[test]
    fn unknown_columns_and_bad_cells_are_reported() {
        let f = write_csv("a,b\n1,2\n");
        let mut config = TabularConfig::for_source(f.path(), 1);
        config.groups = Some(GroupRule {
            attribute: "zzz".into(),
            bins: None,
            edges: None,
        });
        let err = load_tabular(&config).unwrap_err();
        assert!(err.to_string().contains("zzz"), "{err}");

        let f = write_csv("a\n1\nx\n");
        let mut config = TabularConfig::for_source(f.path(), 1);
        config.columns.insert("a".into(), ColumnKind::Numeric);
        assert!(matches!(load_tabular(&config), Err(Error::Load(_))));
    }

    #[test]
    fn ordered_comparison_on_strings_is_rejected() {
        let f = write_csv("a,s\n1,x\n2,y\n");
        let mut config = TabularConfig::for_source(f.path(), 1);
        config.facility = Some(Predicate {
            attribute: "s".into(),
            op: Comparator::Lt,
            value: "y".into(),
        });
        assert!(load_tabular(&config).is_err());
    }

    #[test]
    fn quantile_bins_split_evenly() {
        let values: Vec<f64> = (0..10).map(f64::from).collect();
        assert_eq!(quantile_edges(&values, 5).unwrap(), vec![2.0, 4.0, 6.0, 8.0]);
        assert_eq!(quantile_edges(&[1.0; 6], 3).unwrap(), Vec::<f64>::new());
    }

    #[test]
    fn explicit_edges_and_bins() {
        let mut text = String::from("age,v\n");
        for age in 20..30 {
            text.push_str(&format!("{age},{}\n", age % 3));
        }
        let f = write_csv(&text);
        let mut config = TabularConfig::for_source(f.path(), 2);
        config.groups = Some(GroupRule {
            attribute: "age".into(),
            bins: None,
            edges: Some(vec![23.0, 27.0]),
        });
        let data = load_tabular(&config).unwrap();
        assert_eq!(data.provenance.group_sizes, vec![3, 4, 3]);

        config.groups = Some(GroupRule {
            attribute: "age".into(),
            bins: Some(5),
            edges: None,
        });
        let data = load_tabular(&config).unwrap();
        assert_eq!(data.provenance.group_sizes, vec![2; 5]);
    }

    #[test]
    fn alpha_larger_than_group_is_a_load_error() {
        let f = write_csv("a,s\n1,x\n2,y\n3,y\n");
        let mut config = TabularConfig::for_source(f.path(), 2);
        config.groups = Some(GroupRule {
            attribute: "s".into(),
            bins: None,
            edges: None,
        });
        config.alpha = Some(vec![2, 0]);
        let err = load_tabular(&config).unwrap_err();
        assert!(matches!(err, Error::Load(_)));
        assert!(err.to_string().contains("alpha[0]"));
    }

    #[test]
    fn config_parses_from_toml() {
        let config = TabularConfig::from_toml(
            r#"
            source = "heart.csv"
            k = 10
            alpha = [5, 5]
            [columns]
            sex = "categorical"
            [facility]
            attribute = "age"
            op = "<="
            value = "50"
            [groups]
            attribute = "sex"
            "#,
        )
        .unwrap();
        assert_eq!(config.facility.unwrap().op, Comparator::Le);
        assert_eq!(config.columns["sex"], ColumnKind::Categorical);
        assert_eq!(config.delimiter, ',');
    }
}
