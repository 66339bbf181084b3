#pragma once

// Instrumentation interface of the stub OpenCL driver. Tests look these up
// with dlsym on the same library the loader opens, so both see one instance.

#ifdef __cplusplus
extern "C" {
#endif

enum StubKind { STUB_CONTEXT = 0, STUB_QUEUE, STUB_PROGRAM, STUB_KERNEL, STUB_MEM, STUB_KIND_COUNT };

typedef void (*stub_hook_fn)(void* user);

// Restores the default configuration (one GPU device, no hooks, no injected
// failures) and zeroes every counter. Live objects are forgotten, not freed.
void stub_reset(void);

// Entry-point invocations since the last reset.
unsigned long stub_call_count(const char* entry_point);
// Calls currently executing inside the stub.
long stub_in_flight(void);

long stub_live_objects(int kind);
unsigned long stub_created(int kind);
unsigned long stub_released(int kind);

// Launches seen per kernel name.
unsigned long stub_launch_count(const char* kernel_name);
// Launches issued while a buffer bound to the kernel was mapped.
unsigned long stub_violations(void);

void stub_set_devices(unsigned gpus, unsigned cpus);
// Runs inside clGetPlatformIDs, before it returns.
void stub_set_probe(stub_hook_fn fn, void* user);
// Runs after every emulated kernel launch.
void stub_set_launch_hook(stub_hook_fn fn, void* user);
// The next `times` calls of `entry_point` fail with `code`.
void stub_fail(const char* entry_point, int code, unsigned times);

// Options string passed to the last clBuildProgram.
const char* stub_last_build_options(void);

#ifdef __cplusplus
}
#endif
