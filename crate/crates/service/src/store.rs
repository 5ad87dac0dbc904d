//! Append-only NDJSON event logs, one file per session.

use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use crate::error::ServiceError;
use crate::session::Event;

#[derive(Debug, Clone)]
pub struct Store {
    dir: PathBuf,
}

fn store_err(path: &Path, message: impl ToString) -> ServiceError {
    ServiceError::Store {
        path: path.display().to_string(),
        message: message.to_string(),
    }
}

impl Store {
    pub fn open(data_dir: &Path) -> Result<Self, ServiceError> {
        let dir = data_dir.join("sessions");
        fs::create_dir_all(&dir).map_err(|e| store_err(&dir, e))?;
        Ok(Store { dir })
    }

    pub fn path(&self, session_id: &str) -> PathBuf {
        self.dir.join(format!("{session_id}.ndjson"))
    }

    /// Starts a new log; fails if one already exists for the id.
    pub fn create(&self, session_id: &str, event: &Event) -> Result<(), ServiceError> {
        let path = self.path(session_id);
        let file = OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
            .map_err(|e| store_err(&path, e))?;
        write_line(file, &path, event)
    }

    pub fn append(&self, session_id: &str, event: &Event) -> Result<(), ServiceError> {
        let path = self.path(session_id);
        let file = OpenOptions::new()
            .append(true)
            .open(&path)
            .map_err(|e| store_err(&path, e))?;
        write_line(file, &path, event)
    }

    /// Every session log in the directory. A torn final line (crash during
    /// append) is cut from the file; corruption elsewhere is an error.
    pub fn load_all(&self) -> Result<Vec<(PathBuf, Vec<Event>)>, ServiceError> {
        let mut paths: Vec<PathBuf> = fs::read_dir(&self.dir)
            .map_err(|e| store_err(&self.dir, e))?
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "ndjson"))
            .collect();
        paths.sort();
        paths
            .into_iter()
            .map(|p| read_log(&p).map(|events| (p, events)))
            .collect()
    }
}

fn write_line(mut file: File, path: &Path, event: &Event) -> Result<(), ServiceError> {
    let mut line = serde_json::to_string(event).map_err(|e| store_err(path, e))?;
    line.push('\n');
    file.write_all(line.as_bytes()).map_err(|e| store_err(path, e))?;
    file.sync_data().map_err(|e| store_err(path, e))
}

fn read_log(path: &Path) -> Result<Vec<Event>, ServiceError> {
    let file = File::open(path).map_err(|e| store_err(path, e))?;
    let lines: Vec<String> = BufReader::new(file)
        .lines()
        .collect::<Result<_, _>>()
        .map_err(|e| store_err(path, e))?;
    let mut events = Vec::with_capacity(lines.len());
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str(line) {
            Ok(e) => events.push(e),
            Err(_) if i + 1 == lines.len() => {
                let mut kept = lines[..i].join("\n");
                kept.push('\n');
                fs::write(path, kept).map_err(|e| store_err(path, e))?;
                break;
            }
            Err(e) => return Err(store_err(path, format!("line {}: {e}", i + 1))),
        }
    }
    Ok(events)
}
