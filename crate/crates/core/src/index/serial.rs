//! Binary index format.
//!
//! ```text
//! "CLXI" | u32 version | u32 section count | count × (u32 id, u64 offset, u64 length)
//! section payloads ...
//! u32 CRC32 of everything before it
//! ```
//!
//! All integers little-endian. Offsets are from the start of the stream.

use thiserror::Error;

use super::minmax::{RangeMinMax, BLOCK};
use super::{BitVector, ChainIndex, PathIndex, WaveletTree};
use crate::automaton::Alphabet;

pub const MAGIC: &[u8; 4] = b"CLXI";
pub const VERSION: u32 = 1;

const META: u32 = 1;
const CHAINS: u32 = 2;
const BOUNDARIES: u32 = 3;
const WAVELET: u32 = 4;
const MINMAX: u32 = 5;
const FINALS: u32 = 6;
const SATELLITES: u32 = 7;
const SECTIONS: [u32; 7] = [META, CHAINS, BOUNDARIES, WAVELET, MINMAX, FINALS, SATELLITES];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("index stream is truncated")]
    Truncated,
    #[error("not an index file (bad magic)")]
    BadMagic,
    #[error("unsupported index version {0} (expected {VERSION})")]
    UnsupportedVersion(u32),
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("section {0} missing")]
    MissingSection(u32),
    #[error("malformed index: {0}")]
    Malformed(&'static str),
}

impl FormatError {
    /// Bad magic and unknown versions both mean the stream is not something
    /// this build can read.
    pub fn is_version_mismatch(&self) -> bool {
        matches!(self, Self::BadMagic | Self::UnsupportedVersion(_))
    }
}

#[derive(Default)]
struct Writer {
    buf: Vec<u8>,
}

impl Writer {
    fn u32(&mut self, x: u32) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    fn u64(&mut self, x: u64) {
        self.buf.extend_from_slice(&x.to_le_bytes());
    }

    fn u32s(&mut self, xs: &[u32]) {
        self.u64(xs.len() as u64);
        for &x in xs {
            self.u32(x);
        }
    }

    fn bits(&mut self, bv: &BitVector) {
        self.u64(bv.len() as u64);
        self.u64(bv.words().len() as u64);
        for &w in bv.words() {
            self.u64(w);
        }
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], FormatError> {
        let end = self.pos.checked_add(n).ok_or(FormatError::Truncated)?;
        let s = self.buf.get(self.pos..end).ok_or(FormatError::Truncated)?;
        self.pos = end;
        Ok(s)
    }

    fn u32(&mut self) -> Result<u32, FormatError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }

    fn u64(&mut self) -> Result<u64, FormatError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().unwrap()))
    }

    fn usize(&mut self) -> Result<usize, FormatError> {
        usize::try_from(self.u64()?).map_err(|_| FormatError::Malformed("length overflow"))
    }

    /// A length that must fit in the remaining bytes at `unit` bytes each.
    fn count(&mut self, unit: usize) -> Result<usize, FormatError> {
        let n = self.usize()?;
        if n.saturating_mul(unit) > self.buf.len() - self.pos {
            return Err(FormatError::Truncated);
        }
        Ok(n)
    }

    fn u32s(&mut self) -> Result<Vec<u32>, FormatError> {
        let n = self.count(4)?;
        (0..n).map(|_| self.u32()).collect()
    }

    fn bits(&mut self) -> Result<BitVector, FormatError> {
        let len = self.usize()?;
        let n = self.count(8)?;
        if n != len / 64 + 1 {
            return Err(FormatError::Malformed("bitvector word count"));
        }
        let words = (0..n).map(|_| self.u64()).collect::<Result<Vec<_>, _>>()?;
        Ok(BitVector::from_words(words, len))
    }

    fn done(&self) -> Result<(), FormatError> {
        if self.pos == self.buf.len() {
            Ok(())
        } else {
            Err(FormatError::Malformed("trailing bytes in section"))
        }
    }
}

pub(super) fn write(idx: &PathIndex) -> Vec<u8> {
    let mut sections: Vec<(u32, Writer)> = SECTIONS.iter().map(|&id| (id, Writer::default())).collect();
    {
        let w = &mut sections[0].1;
        w.u32(idx.chains.len() as u32);
        w.u64(idx.num_states as u64);
        w.u64(idx.num_edges as u64);
        let chars: Vec<u32> = idx.alphabet.chars().iter().map(|&c| c as u32).collect();
        w.u32s(&chars);
        w.u32(idx.label_bits as u32);
        w.u32(idx.chain_bits as u32);
        w.u64(idx.initial.0 as u64);
        w.u64(idx.initial.1 as u64);
    }
    for ch in &idx.chains {
        sections[1].1.u64(ch.states.len() as u64);
        sections[2].1.bits(&ch.boundaries);
        let w = &mut sections[3].1;
        w.u64(ch.wavelet.len as u64);
        w.u32(ch.wavelet.levels.len() as u32);
        for level in &ch.wavelet.levels {
            w.bits(level);
        }
        w.u32s(&ch.wavelet.leaves);
        let w = &mut sections[4].1;
        let mm = &ch.minmax;
        w.u64(mm.len as u64);
        for v in [&mm.prefix_min, &mm.prefix_max, &mm.suffix_min, &mm.suffix_max] {
            w.u32s(v);
        }
        for table in [&mm.table_min, &mm.table_max] {
            w.u32(table.len() as u32);
            for row in table {
                w.u32s(row);
            }
        }
        sections[5].1.bits(&ch.finals);
        sections[6].1.u32s(&ch.states);
    }

    let header = 12 + 20 * sections.len();
    let mut out = Writer::default();
    out.buf.extend_from_slice(MAGIC);
    out.u32(VERSION);
    out.u32(sections.len() as u32);
    let mut offset = header as u64;
    for (id, w) in &sections {
        out.u32(*id);
        out.u64(offset);
        out.u64(w.buf.len() as u64);
        offset += w.buf.len() as u64;
    }
    for (_, w) in &sections {
        out.buf.extend_from_slice(&w.buf);
    }
    let crc = crc32fast::hash(&out.buf);
    out.u32(crc);
    out.buf
}

pub(super) fn read(bytes: &[u8]) -> Result<PathIndex, FormatError> {
    if bytes.len() < 4 {
        return Err(FormatError::Truncated);
    }
    if &bytes[..4] != MAGIC {
        return Err(FormatError::BadMagic);
    }
    if bytes.len() < 8 {
        return Err(FormatError::Truncated);
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != VERSION {
        return Err(FormatError::UnsupportedVersion(version));
    }
    if bytes.len() < 16 {
        return Err(FormatError::Truncated);
    }
    let (body, tail) = bytes.split_at(bytes.len() - 4);
    let stored = u32::from_le_bytes(tail.try_into().unwrap());
    let computed = crc32fast::hash(body);
    if stored != computed {
        return Err(FormatError::Checksum { stored, computed });
    }

    let mut head = Reader { buf: body, pos: 8 };
    let count = head.u32()? as usize;
    let mut table = Vec::with_capacity(count.min(64));
    for _ in 0..count {
        let id = head.u32()?;
        let offset = head.usize()?;
        let len = head.usize()?;
        let end = offset.checked_add(len).ok_or(FormatError::Truncated)?;
        let payload = body.get(offset..end).ok_or(FormatError::Truncated)?;
        table.push((id, payload));
    }
    let section = |id: u32| -> Result<Reader<'_>, FormatError> {
        table
            .iter()
            .find(|(x, _)| *x == id)
            .map(|&(_, buf)| Reader { buf, pos: 0 })
            .ok_or(FormatError::MissingSection(id))
    };

    let mut meta = section(META)?;
    let t = meta.u32()? as usize;
    let num_states = meta.usize()?;
    let num_edges = meta.usize()?;
    let chars = meta
        .u32s()?
        .into_iter()
        .map(|c| char::from_u32(c).ok_or(FormatError::Malformed("alphabet character")))
        .collect::<Result<Vec<_>, _>>()?;
    let alphabet = Alphabet::new(chars).map_err(|_| FormatError::Malformed("alphabet"))?;
    let label_bits = meta.u32()? as usize;
    let chain_bits = meta.u32()? as usize;
    let initial = (meta.usize()?, meta.usize()?);
    meta.done()?;

    let mut lens = section(CHAINS)?;
    let mut bounds = section(BOUNDARIES)?;
    let mut wave = section(WAVELET)?;
    let mut mm = section(MINMAX)?;
    let mut fin = section(FINALS)?;
    let mut sat = section(SATELLITES)?;
    let mut chains = Vec::with_capacity(t.min(1 << 16));
    for _ in 0..t {
        let len = lens.usize()?;
        let boundaries = bounds.bits()?;
        let wlen = wave.usize()?;
        let height = wave.u32()? as usize;
        if height != label_bits + chain_bits {
            return Err(FormatError::Malformed("wavelet height"));
        }
        let levels = (0..height).map(|_| wave.bits()).collect::<Result<Vec<_>, _>>()?;
        let leaves = wave.u32s()?;
        let mlen = mm.usize()?;
        let mut arrays = Vec::with_capacity(4);
        for _ in 0..4 {
            arrays.push(mm.u32s()?);
        }
        let mut tables = Vec::with_capacity(2);
        for _ in 0..2 {
            let rows = mm.u32()? as usize;
            tables.push((0..rows).map(|_| mm.u32s()).collect::<Result<Vec<_>, _>>()?);
        }
        let finals = fin.bits()?;
        let states = sat.u32s()?;

        let nblocks = wlen.div_ceil(BLOCK);
        let rows = if nblocks <= 1 { 1 } else { nblocks.ilog2() as usize + 1 };
        let tables_ok = tables.iter().all(|tb| {
            tb.len() == rows && tb.iter().enumerate().all(|(k, row)| row.len() + (1 << k) == nblocks + 1)
        });
        if len == 0
            || states.len() != len
            || finals.len() != len
            || boundaries.len() != len + 1 + wlen
            || boundaries.ones() != len + 1
            || leaves.len() != wlen
            || levels.iter().any(|l| l.len() != wlen)
            || mlen != wlen
            || arrays.iter().any(|a| a.len() != wlen)
            || !tables_ok
            || states.iter().any(|&u| u as usize >= num_states)
            || leaves.contains(&0)
        {
            return Err(FormatError::Malformed("chain structure"));
        }
        let [prefix_min, prefix_max, suffix_min, suffix_max]: [Vec<u32>; 4] =
            arrays.try_into().expect("four arrays");
        let [table_min, table_max]: [Vec<Vec<u32>>; 2] = tables.try_into().expect("two tables");
        chains.push(ChainIndex {
            states,
            finals,
            boundaries,
            wavelet: WaveletTree {
                len: wlen,
                levels,
                leaves,
            },
            minmax: RangeMinMax {
                len: mlen,
                prefix_min,
                prefix_max,
                suffix_min,
                suffix_max,
                table_min,
                table_max,
            },
        });
    }
    for r in [&lens, &bounds, &wave, &mm, &fin, &sat] {
        r.done()?;
    }
    if t == 0
        || initial.0 >= t
        || initial.1 == 0
        || initial.1 > chains[initial.0].states.len()
        || chains.iter().map(|c| c.states.len()).sum::<usize>() != num_states
        || chains.iter().map(|c| c.wavelet.len).sum::<usize>() != num_edges
        || t > 1 << chain_bits
        || alphabet.len() > 1 << label_bits
    {
        return Err(FormatError::Malformed("index metadata"));
    }
    // target positions must lie inside their chains; check via the key of each entry
    let mask = (1u32 << chain_bits) - 1;
    for ch in &chains {
        for p in 0..ch.wavelet.len {
            let (key, q) = ch.wavelet.access(p);
            let j = (key & mask) as usize;
            let label = (key >> chain_bits) as usize + 1;
            if j >= t || q as usize > chains[j].states.len() || label > alphabet.len() {
                return Err(FormatError::Malformed("edge target"));
            }
        }
    }
    Ok(PathIndex {
        alphabet,
        num_states,
        num_edges,
        label_bits,
        chain_bits,
        initial,
        chains,
    })
}
