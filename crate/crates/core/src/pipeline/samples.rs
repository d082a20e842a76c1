//! `ZHS1` sample files: a fixed header followed by fixed-size records.
//!
//! Header: magic `ZHS1`, scheme code (u8), plane count (u16 LE), sample
//! count (u64 LE). Record: every plane value as f32 LE, policy index
//! (u16 LE), value label (i8).

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Seek, SeekFrom, Write};
use std::path::Path;

use thiserror::Error;

use crate::encoding::{plane, InputPlanes, PolicyScheme, NUM_PLANES, PLANE_SIZE};
use crate::rules::Color;

pub const MAGIC: &[u8; 4] = b"ZHS1";
pub const HEADER_LEN: u64 = 4 + 1 + 2 + 8;
const VALUES: usize = NUM_PLANES * PLANE_SIZE;
pub const RECORD_LEN: u64 = (VALUES * 4 + 2 + 1) as u64;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainingSample {
    pub planes: InputPlanes,
    pub policy: u16,
    /// Game result for the side to move: -1, 0 or 1.
    pub value: i8,
}

#[derive(Debug, Error)]
pub enum SampleError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("not a sample file (magic {0:?})")]
    Magic([u8; 4]),
    #[error("unknown policy scheme code {0}")]
    Scheme(u8),
    #[error("expected {NUM_PLANES} planes, file has {0}")]
    Planes(u16),
    #[error("truncated sample at byte offset {offset}")]
    Truncated { offset: u64 },
    #[error("unexpected data after the last sample at byte offset {offset}")]
    Trailing { offset: u64 },
    #[error("sample {index} is invalid: {reason}")]
    Invalid { index: u64, reason: String },
}

/// Streams samples to `inner` and fills in the count on `finish`.
pub struct SampleWriter<W: Write + Seek> {
    inner: W,
    count: u64,
}

impl<W: Write + Seek> SampleWriter<W> {
    pub fn new(mut inner: W, scheme: PolicyScheme) -> io::Result<SampleWriter<W>> {
        inner.write_all(MAGIC)?;
        inner.write_all(&[scheme.code()])?;
        inner.write_all(&(NUM_PLANES as u16).to_le_bytes())?;
        inner.write_all(&0u64.to_le_bytes())?;
        Ok(SampleWriter { inner, count: 0 })
    }

    pub fn write(&mut self, sample: &TrainingSample) -> io::Result<()> {
        let mut buf = Vec::with_capacity(RECORD_LEN as usize);
        for v in sample.planes.values() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
        buf.extend_from_slice(&sample.policy.to_le_bytes());
        buf.push(sample.value as u8);
        self.inner.write_all(&buf)?;
        self.count += 1;
        Ok(())
    }

    pub fn finish(mut self) -> io::Result<W> {
        self.inner.flush()?;
        let end = self.inner.stream_position()?;
        self.inner.seek(SeekFrom::Start(7))?;
        self.inner.write_all(&self.count.to_le_bytes())?;
        self.inner.seek(SeekFrom::Start(end))?;
        self.inner.flush()?;
        Ok(self.inner)
    }
}

pub fn write_samples(path: &Path, scheme: PolicyScheme, samples: &[TrainingSample]) -> io::Result<()> {
    let mut w = SampleWriter::new(BufWriter::new(File::create(path)?), scheme)?;
    for s in samples {
        w.write(s)?;
    }
    w.finish()?.into_inner().map_err(|e| e.into_error())?.sync_all()
}

fn read_full<R: Read>(r: &mut R, buf: &mut [u8]) -> io::Result<usize> {
    let mut filled = 0;
    while filled < buf.len() {
        match r.read(&mut buf[filled..]) {
            Ok(0) => break,
            Ok(n) => filled += n,
            Err(e) if e.kind() == io::ErrorKind::Interrupted => {}
            Err(e) => return Err(e),
        }
    }
    Ok(filled)
}

/// Reads a whole sample stream. Any short header, short record or extra
/// bytes are reported with their byte offset.
pub fn read_samples_from<R: Read>(mut r: R) -> Result<(PolicyScheme, Vec<TrainingSample>), SampleError> {
    let mut header = [0u8; HEADER_LEN as usize];
    let got = read_full(&mut r, &mut header)?;
    if got < 4 || &header[..4] != MAGIC {
        let mut m = [0u8; 4];
        m[..got.min(4)].copy_from_slice(&header[..got.min(4)]);
        return Err(SampleError::Magic(m));
    }
    if got < HEADER_LEN as usize {
        return Err(SampleError::Truncated { offset: 0 });
    }
    let scheme = PolicyScheme::from_code(header[4]).ok_or(SampleError::Scheme(header[4]))?;
    let planes = u16::from_le_bytes([header[5], header[6]]);
    if planes as usize != NUM_PLANES {
        return Err(SampleError::Planes(planes));
    }
    let count = u64::from_le_bytes(header[7..15].try_into().expect("8 bytes"));

    let mut samples = Vec::with_capacity(count.min(1 << 16) as usize);
    let mut record = vec![0u8; RECORD_LEN as usize];
    for index in 0..count {
        let offset = HEADER_LEN + index * RECORD_LEN;
        if read_full(&mut r, &mut record)? < record.len() {
            return Err(SampleError::Truncated { offset });
        }
        let values: Vec<f32> = record[..VALUES * 4]
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect();
        let policy = u16::from_le_bytes([record[VALUES * 4], record[VALUES * 4 + 1]]);
        let value = record[VALUES * 4 + 2] as i8;
        if policy as usize >= scheme.size() {
            return Err(SampleError::Invalid {
                index,
                reason: format!("policy index {policy} outside {scheme}"),
            });
        }
        let perspective = if values[plane::COLOUR * PLANE_SIZE] >= 0.5 {
            Color::White
        } else {
            Color::Black
        };
        let planes = InputPlanes::from_raw(values, perspective).expect("record holds every plane");
        samples.push(TrainingSample { planes, policy, value });
    }
    let mut extra = [0u8; 1];
    if read_full(&mut r, &mut extra)? > 0 {
        return Err(SampleError::Trailing {
            offset: HEADER_LEN + count * RECORD_LEN,
        });
    }
    Ok((scheme, samples))
}

pub fn read_samples(path: &Path) -> Result<(PolicyScheme, Vec<TrainingSample>), SampleError> {
    read_samples_from(BufReader::new(File::open(path)?))
}
