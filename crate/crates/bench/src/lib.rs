// Copyright 2026 The chiral-core Authors
// SPDX-License-Identifier: Apache-2.0

//! Criterion benchmarks for the simulation kernels live in `benches/`.
