//! Label-stream files: one ASCII record per LF-terminated line,
//! `sample_id<TAB>class,class,...`, no header, no payload.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::sample::{LabelSet, Sample};

/// Batches samples from a stream file in file order.
pub struct StreamReader<R> {
    reader: R,
    buf: String,
    line: usize,
    batch_size: usize,
    done: bool,
}

impl<R: BufRead> StreamReader<R> {
    pub fn new(reader: R, batch_size: usize) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::InvalidSpec("batch size must be positive".into()));
        }
        Ok(StreamReader {
            reader,
            buf: String::new(),
            line: 0,
            batch_size,
            done: false,
        })
    }
}

pub fn read_stream_file(path: &Path, batch_size: usize) -> Result<StreamReader<BufReader<File>>> {
    let file = File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    StreamReader::new(BufReader::new(file), batch_size)
}

fn parse_line(text: &str, line: usize) -> Result<Sample> {
    let parse_err = |message: String| Error::Parse { line, message };
    let mut fields = text.split('\t');
    let id_field = fields.next().unwrap_or_default();
    let labels_field = fields
        .next()
        .ok_or_else(|| parse_err("missing label field".into()))?;
    if let Some(extra) = fields.next() {
        return Err(Error::UnknownField {
            line,
            field: extra.to_string(),
        });
    }
    let id: u64 = id_field
        .parse()
        .map_err(|_| parse_err(format!("invalid sample id {id_field:?}")))?;
    let classes = labels_field
        .split(',')
        .map(|c| {
            c.parse::<u32>()
                .map_err(|_| parse_err(format!("invalid class id {c:?}")))
        })
        .collect::<Result<Vec<u32>>>()?;
    let labels = LabelSet::new(classes).map_err(|_| parse_err("empty label list".into()))?;
    Ok(Sample::new(id, labels))
}

impl<R: BufRead> Iterator for StreamReader<R> {
    type Item = Result<Vec<Sample>>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        let mut batch = Vec::with_capacity(self.batch_size);
        while batch.len() < self.batch_size {
            self.buf.clear();
            match self.reader.read_line(&mut self.buf) {
                Ok(0) => {
                    self.done = true;
                    break;
                }
                Err(e) => {
                    self.done = true;
                    return Some(Err(e.into()));
                }
                Ok(_) => {
                    self.line += 1;
                    let text = self.buf.strip_suffix('\n').unwrap_or(&self.buf);
                    match parse_line(text, self.line) {
                        Ok(s) => batch.push(s),
                        Err(e) => {
                            self.done = true;
                            return Some(Err(e));
                        }
                    }
                }
            }
        }
        (!batch.is_empty()).then_some(Ok(batch))
    }
}

pub fn write_stream<'a, W, I>(mut out: W, samples: I) -> Result<()>
where
    W: Write,
    I: IntoIterator<Item = &'a Sample>,
{
    for s in samples {
        writeln!(out, "{}\t{}", s.id, s.labels)?;
    }
    out.flush()?;
    Ok(())
}

pub fn write_stream_file<'a, I>(path: &Path, samples: I) -> Result<()>
where
    I: IntoIterator<Item = &'a Sample>,
{
    let file = File::create(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    write_stream(BufWriter::new(file), samples)
}
