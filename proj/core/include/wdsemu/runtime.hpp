#pragma once

namespace wdsemu {

/// Keeps freed tensor buffers in the heap instead of returning them to the
/// OS. Tape-heavy workloads allocate and free the same large blocks
/// thousands of times per step, and fresh pages cost a page fault each.
/// No effect outside glibc.
void configure_allocator();

}  // namespace wdsemu
