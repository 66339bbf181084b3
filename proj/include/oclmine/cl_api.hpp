#pragma once

// OpenCL 1.2 C API declarations needed by the runtime loader. Type layouts
// and constant values follow the Khronos headers, so pointers resolved from a
// native driver can be called through these signatures directly. Everything
// lives in oclmine::cl to avoid clashing with <CL/cl.h> if both are included.

#include <cstddef>
#include <cstdint>

#define OCLMINE_CL_CALLBACK

namespace oclmine::cl {

using cl_char = std::int8_t;
using cl_uchar = std::uint8_t;
using cl_short = std::int16_t;
using cl_ushort = std::uint16_t;
using cl_int = std::int32_t;
using cl_uint = std::uint32_t;
using cl_long = std::int64_t;
using cl_ulong = std::uint64_t;
using cl_float = float;

using cl_bool = cl_uint;
using cl_bitfield = cl_ulong;
using cl_device_type = cl_bitfield;
using cl_platform_info = cl_uint;
using cl_device_info = cl_uint;
using cl_device_partition_property = std::intptr_t;
using cl_command_queue_properties = cl_bitfield;
using cl_context_properties = std::intptr_t;
using cl_context_info = cl_uint;
using cl_command_queue_info = cl_uint;
using cl_mem_flags = cl_bitfield;
using cl_mem_object_type = cl_uint;
using cl_mem_info = cl_uint;
using cl_mem_migration_flags = cl_bitfield;
using cl_image_info = cl_uint;
using cl_buffer_create_type = cl_uint;
using cl_addressing_mode = cl_uint;
using cl_filter_mode = cl_uint;
using cl_sampler_info = cl_uint;
using cl_map_flags = cl_bitfield;
using cl_program_info = cl_uint;
using cl_program_build_info = cl_uint;
using cl_kernel_info = cl_uint;
using cl_kernel_arg_info = cl_uint;
using cl_kernel_work_group_info = cl_uint;
using cl_event_info = cl_uint;
using cl_profiling_info = cl_uint;

}  // namespace oclmine::cl

// Opaque handle types. Kept at global scope with the Khronos tag names so a
// driver built against the official headers shares the same types.
struct _cl_platform_id;
struct _cl_device_id;
struct _cl_context;
struct _cl_command_queue;
struct _cl_mem;
struct _cl_program;
struct _cl_kernel;
struct _cl_event;
struct _cl_sampler;

namespace oclmine::cl {

using cl_platform_id = ::_cl_platform_id*;
using cl_device_id = ::_cl_device_id*;
using cl_context = ::_cl_context*;
using cl_command_queue = ::_cl_command_queue*;
using cl_mem = ::_cl_mem*;
using cl_program = ::_cl_program*;
using cl_kernel = ::_cl_kernel*;
using cl_event = ::_cl_event*;
using cl_sampler = ::_cl_sampler*;

struct cl_image_format {
  cl_uint image_channel_order;
  cl_uint image_channel_data_type;
};

struct cl_image_desc {
  cl_mem_object_type image_type;
  std::size_t image_width;
  std::size_t image_height;
  std::size_t image_depth;
  std::size_t image_array_size;
  std::size_t image_row_pitch;
  std::size_t image_slice_pitch;
  cl_uint num_mip_levels;
  cl_uint num_samples;
  cl_mem buffer;
};

using context_notify_fn = void(OCLMINE_CL_CALLBACK*)(const char*, const void*, std::size_t, void*);
using program_notify_fn = void(OCLMINE_CL_CALLBACK*)(cl_program, void*);
using mem_destructor_fn = void(OCLMINE_CL_CALLBACK*)(cl_mem, void*);
using event_notify_fn = void(OCLMINE_CL_CALLBACK*)(cl_event, cl_int, void*);
using native_kernel_fn = void(OCLMINE_CL_CALLBACK*)(void*);

// Error codes
inline constexpr cl_int CL_SUCCESS = 0;
inline constexpr cl_int CL_DEVICE_NOT_FOUND = -1;
inline constexpr cl_int CL_DEVICE_NOT_AVAILABLE = -2;
inline constexpr cl_int CL_COMPILER_NOT_AVAILABLE = -3;
inline constexpr cl_int CL_MEM_OBJECT_ALLOCATION_FAILURE = -4;
inline constexpr cl_int CL_OUT_OF_RESOURCES = -5;
inline constexpr cl_int CL_OUT_OF_HOST_MEMORY = -6;
inline constexpr cl_int CL_BUILD_PROGRAM_FAILURE = -11;
inline constexpr cl_int CL_INVALID_VALUE = -30;
inline constexpr cl_int CL_INVALID_DEVICE_TYPE = -31;
inline constexpr cl_int CL_INVALID_PLATFORM = -32;
inline constexpr cl_int CL_INVALID_DEVICE = -33;
inline constexpr cl_int CL_INVALID_CONTEXT = -34;
inline constexpr cl_int CL_INVALID_COMMAND_QUEUE = -36;
inline constexpr cl_int CL_INVALID_HOST_PTR = -37;
inline constexpr cl_int CL_INVALID_MEM_OBJECT = -38;
inline constexpr cl_int CL_INVALID_PROGRAM = -44;
inline constexpr cl_int CL_INVALID_PROGRAM_EXECUTABLE = -45;
inline constexpr cl_int CL_INVALID_KERNEL_NAME = -46;
inline constexpr cl_int CL_INVALID_KERNEL = -48;
inline constexpr cl_int CL_INVALID_ARG_INDEX = -49;
inline constexpr cl_int CL_INVALID_ARG_VALUE = -50;
inline constexpr cl_int CL_INVALID_ARG_SIZE = -51;
inline constexpr cl_int CL_INVALID_KERNEL_ARGS = -52;
inline constexpr cl_int CL_INVALID_WORK_DIMENSION = -53;
inline constexpr cl_int CL_INVALID_GLOBAL_WORK_SIZE = -63;
inline constexpr cl_int CL_INVALID_OPERATION = -59;
inline constexpr cl_int CL_INVALID_BUFFER_SIZE = -61;
inline constexpr cl_int CL_PLATFORM_NOT_FOUND_KHR = -1001;

// Booleans
inline constexpr cl_bool CL_FALSE = 0;
inline constexpr cl_bool CL_TRUE = 1;

// cl_platform_info
inline constexpr cl_platform_info CL_PLATFORM_PROFILE = 0x0900;
inline constexpr cl_platform_info CL_PLATFORM_VERSION = 0x0901;
inline constexpr cl_platform_info CL_PLATFORM_NAME = 0x0902;
inline constexpr cl_platform_info CL_PLATFORM_VENDOR = 0x0903;

// cl_device_type
inline constexpr cl_device_type CL_DEVICE_TYPE_DEFAULT = 1u << 0;
inline constexpr cl_device_type CL_DEVICE_TYPE_CPU = 1u << 1;
inline constexpr cl_device_type CL_DEVICE_TYPE_GPU = 1u << 2;
inline constexpr cl_device_type CL_DEVICE_TYPE_ACCELERATOR = 1u << 3;
inline constexpr cl_device_type CL_DEVICE_TYPE_ALL = 0xFFFFFFFF;

// cl_device_info
inline constexpr cl_device_info CL_DEVICE_TYPE = 0x1000;
inline constexpr cl_device_info CL_DEVICE_NAME = 0x102B;
inline constexpr cl_device_info CL_DEVICE_VENDOR = 0x102C;
inline constexpr cl_device_info CL_DEVICE_VERSION = 0x102F;
inline constexpr cl_device_info CL_DEVICE_HOST_UNIFIED_MEMORY = 0x1035;

// cl_context_properties
inline constexpr cl_context_properties CL_CONTEXT_PLATFORM = 0x1084;

// cl_mem_flags
inline constexpr cl_mem_flags CL_MEM_READ_WRITE = 1u << 0;
inline constexpr cl_mem_flags CL_MEM_WRITE_ONLY = 1u << 1;
inline constexpr cl_mem_flags CL_MEM_READ_ONLY = 1u << 2;
inline constexpr cl_mem_flags CL_MEM_USE_HOST_PTR = 1u << 3;
inline constexpr cl_mem_flags CL_MEM_ALLOC_HOST_PTR = 1u << 4;
inline constexpr cl_mem_flags CL_MEM_COPY_HOST_PTR = 1u << 5;

// cl_map_flags
inline constexpr cl_map_flags CL_MAP_READ = 1u << 0;
inline constexpr cl_map_flags CL_MAP_WRITE = 1u << 1;

// cl_program_build_info
inline constexpr cl_program_build_info CL_PROGRAM_BUILD_STATUS = 0x1181;
inline constexpr cl_program_build_info CL_PROGRAM_BUILD_OPTIONS = 0x1182;
inline constexpr cl_program_build_info CL_PROGRAM_BUILD_LOG = 0x1183;

}  // namespace oclmine::cl

// The complete OpenCL 1.2 entry point list (core plus the 1.1 APIs that 1.2
// deprecated). Three shapes:
//   CODE(name, params, args)        returns cl_int status
//   ERR(ret, name, params, args)    returns a handle, status via errcode_ret
//   PTR(name, params, args)         returns void*, no status channel
#define OCLMINE_CL_API(CODE, ERR, PTR)                                                              \
  /* platform */                                                                                    \
  CODE(clGetPlatformIDs, (cl_uint num_entries, cl_platform_id * platforms, cl_uint * num_platforms), \
       (num_entries, platforms, num_platforms))                                                     \
  CODE(clGetPlatformInfo,                                                                           \
       (cl_platform_id platform, cl_platform_info param_name, std::size_t param_value_size,         \
        void* param_value, std::size_t* param_value_size_ret),                                      \
       (platform, param_name, param_value_size, param_value, param_value_size_ret))                 \
  /* device */                                                                                      \
  CODE(clGetDeviceIDs,                                                                              \
       (cl_platform_id platform, cl_device_type device_type, cl_uint num_entries,                   \
        cl_device_id * devices, cl_uint * num_devices),                                             \
       (platform, device_type, num_entries, devices, num_devices))                                  \
  CODE(clGetDeviceInfo,                                                                             \
       (cl_device_id device, cl_device_info param_name, std::size_t param_value_size,               \
        void* param_value, std::size_t* param_value_size_ret),                                      \
       (device, param_name, param_value_size, param_value, param_value_size_ret))                   \
  CODE(clCreateSubDevices,                                                                          \
       (cl_device_id in_device, const cl_device_partition_property* properties,                     \
        cl_uint num_devices, cl_device_id* out_devices, cl_uint* num_devices_ret),                  \
       (in_device, properties, num_devices, out_devices, num_devices_ret))                          \
  CODE(clRetainDevice, (cl_device_id device), (device))                                             \
  CODE(clReleaseDevice, (cl_device_id device), (device))                                            \
  /* context */                                                                                     \
  ERR(cl_context, clCreateContext,                                                                  \
      (const cl_context_properties* properties, cl_uint num_devices, const cl_device_id* devices,   \
       context_notify_fn pfn_notify, void* user_data, cl_int* errcode_ret),                         \
      (properties, num_devices, devices, pfn_notify, user_data, errcode_ret))                       \
  ERR(cl_context, clCreateContextFromType,                                                          \
      (const cl_context_properties* properties, cl_device_type device_type,                         \
       context_notify_fn pfn_notify, void* user_data, cl_int* errcode_ret),                         \
      (properties, device_type, pfn_notify, user_data, errcode_ret))                                \
  CODE(clRetainContext, (cl_context context), (context))                                            \
  CODE(clReleaseContext, (cl_context context), (context))                                           \
  CODE(clGetContextInfo,                                                                            \
       (cl_context context, cl_context_info param_name, std::size_t param_value_size,               \
        void* param_value, std::size_t* param_value_size_ret),                                      \
       (context, param_name, param_value_size, param_value, param_value_size_ret))                  \
  /* command queue */                                                                               \
  ERR(cl_command_queue, clCreateCommandQueue,                                                       \
      (cl_context context, cl_device_id device, cl_command_queue_properties properties,             \
       cl_int* errcode_ret),                                                                        \
      (context, device, properties, errcode_ret))                                                   \
  CODE(clRetainCommandQueue, (cl_command_queue command_queue), (command_queue))                     \
  CODE(clReleaseCommandQueue, (cl_command_queue command_queue), (command_queue))                    \
  CODE(clGetCommandQueueInfo,                                                                       \
       (cl_command_queue command_queue, cl_command_queue_info param_name,                           \
        std::size_t param_value_size, void* param_value, std::size_t* param_value_size_ret),        \
       (command_queue, param_name, param_value_size, param_value, param_value_size_ret))            \
  /* memory objects */                                                                              \
  ERR(cl_mem, clCreateBuffer,                                                                       \
      (cl_context context, cl_mem_flags flags, std::size_t size, void* host_ptr,                    \
       cl_int* errcode_ret),                                                                        \
      (context, flags, size, host_ptr, errcode_ret))                                                \
  ERR(cl_mem, clCreateSubBuffer,                                                                    \
      (cl_mem buffer, cl_mem_flags flags, cl_buffer_create_type buffer_create_type,                 \
       const void* buffer_create_info, cl_int* errcode_ret),                                        \
      (buffer, flags, buffer_create_type, buffer_create_info, errcode_ret))                         \
  ERR(cl_mem, clCreateImage,                                                                        \
      (cl_context context, cl_mem_flags flags, const cl_image_format* image_format,                 \
       const cl_image_desc* image_desc, void* host_ptr, cl_int* errcode_ret),                       \
      (context, flags, image_format, image_desc, host_ptr, errcode_ret))                            \
  CODE(clRetainMemObject, (cl_mem memobj), (memobj))                                                \
  CODE(clReleaseMemObject, (cl_mem memobj), (memobj))                                               \
  CODE(clGetSupportedImageFormats,                                                                  \
       (cl_context context, cl_mem_flags flags, cl_mem_object_type image_type,                      \
        cl_uint num_entries, cl_image_format* image_formats, cl_uint* num_image_formats),           \
       (context, flags, image_type, num_entries, image_formats, num_image_formats))                 \
  CODE(clGetMemObjectInfo,                                                                          \
       (cl_mem memobj, cl_mem_info param_name, std::size_t param_value_size, void* param_value,     \
        std::size_t* param_value_size_ret),                                                         \
       (memobj, param_name, param_value_size, param_value, param_value_size_ret))                   \
  CODE(clGetImageInfo,                                                                              \
       (cl_mem image, cl_image_info param_name, std::size_t param_value_size, void* param_value,    \
        std::size_t* param_value_size_ret),                                                         \
       (image, param_name, param_value_size, param_value, param_value_size_ret))                    \
  CODE(clSetMemObjectDestructorCallback,                                                            \
       (cl_mem memobj, mem_destructor_fn pfn_notify, void* user_data),                              \
       (memobj, pfn_notify, user_data))                                                             \
  /* samplers */                                                                                    \
  ERR(cl_sampler, clCreateSampler,                                                                  \
      (cl_context context, cl_bool normalized_coords, cl_addressing_mode addressing_mode,           \
       cl_filter_mode filter_mode, cl_int* errcode_ret),                                            \
      (context, normalized_coords, addressing_mode, filter_mode, errcode_ret))                      \
  CODE(clRetainSampler, (cl_sampler sampler), (sampler))                                            \
  CODE(clReleaseSampler, (cl_sampler sampler), (sampler))                                           \
  CODE(clGetSamplerInfo,                                                                            \
       (cl_sampler sampler, cl_sampler_info param_name, std::size_t param_value_size,               \
        void* param_value, std::size_t* param_value_size_ret),                                      \
       (sampler, param_name, param_value_size, param_value, param_value_size_ret))                  \
  /* programs */                                                                                    \
  ERR(cl_program, clCreateProgramWithSource,                                                        \
      (cl_context context, cl_uint count, const char** strings, const std::size_t* lengths,         \
       cl_int* errcode_ret),                                                                        \
      (context, count, strings, lengths, errcode_ret))                                              \
  ERR(cl_program, clCreateProgramWithBinary,                                                        \
      (cl_context context, cl_uint num_devices, const cl_device_id* device_list,                    \
       const std::size_t* lengths, const unsigned char** binaries, cl_int* binary_status,           \
       cl_int* errcode_ret),                                                                        \
      (context, num_devices, device_list, lengths, binaries, binary_status, errcode_ret))           \
  ERR(cl_program, clCreateProgramWithBuiltInKernels,                                                \
      (cl_context context, cl_uint num_devices, const cl_device_id* device_list,                    \
       const char* kernel_names, cl_int* errcode_ret),                                              \
      (context, num_devices, device_list, kernel_names, errcode_ret))                               \
  CODE(clRetainProgram, (cl_program program), (program))                                            \
  CODE(clReleaseProgram, (cl_program program), (program))                                           \
  CODE(clBuildProgram,                                                                              \
       (cl_program program, cl_uint num_devices, const cl_device_id* device_list,                   \
        const char* options, program_notify_fn pfn_notify, void* user_data),                        \
       (program, num_devices, device_list, options, pfn_notify, user_data))                         \
  CODE(clCompileProgram,                                                                            \
       (cl_program program, cl_uint num_devices, const cl_device_id* device_list,                   \
        const char* options, cl_uint num_input_headers, const cl_program* input_headers,            \
        const char** header_include_names, program_notify_fn pfn_notify, void* user_data),          \
       (program, num_devices, device_list, options, num_input_headers, input_headers,               \
        header_include_names, pfn_notify, user_data))                                               \
  ERR(cl_program, clLinkProgram,                                                                    \
      (cl_context context, cl_uint num_devices, const cl_device_id* device_list,                    \
       const char* options, cl_uint num_input_programs, const cl_program* input_programs,           \
       program_notify_fn pfn_notify, void* user_data, cl_int* errcode_ret),                         \
      (context, num_devices, device_list, options, num_input_programs, input_programs,              \
       pfn_notify, user_data, errcode_ret))                                                         \
  CODE(clUnloadPlatformCompiler, (cl_platform_id platform), (platform))                             \
  CODE(clGetProgramInfo,                                                                            \
       (cl_program program, cl_program_info param_name, std::size_t param_value_size,               \
        void* param_value, std::size_t* param_value_size_ret),                                      \
       (program, param_name, param_value_size, param_value, param_value_size_ret))                  \
  CODE(clGetProgramBuildInfo,                                                                       \
       (cl_program program, cl_device_id device, cl_program_build_info param_name,                  \
        std::size_t param_value_size, void* param_value, std::size_t* param_value_size_ret),        \
       (program, device, param_name, param_value_size, param_value, param_value_size_ret))          \
  /* kernels */                                                                                     \
  ERR(cl_kernel, clCreateKernel, (cl_program program, const char* kernel_name, cl_int* errcode_ret), \
      (program, kernel_name, errcode_ret))                                                          \
  CODE(clCreateKernelsInProgram,                                                                    \
       (cl_program program, cl_uint num_kernels, cl_kernel* kernels, cl_uint* num_kernels_ret),     \
       (program, num_kernels, kernels, num_kernels_ret))                                            \
  CODE(clRetainKernel, (cl_kernel kernel), (kernel))                                                \
  CODE(clReleaseKernel, (cl_kernel kernel), (kernel))                                               \
  CODE(clSetKernelArg,                                                                              \
       (cl_kernel kernel, cl_uint arg_index, std::size_t arg_size, const void* arg_value),          \
       (kernel, arg_index, arg_size, arg_value))                                                    \
  CODE(clGetKernelInfo,                                                                             \
       (cl_kernel kernel, cl_kernel_info param_name, std::size_t param_value_size,                  \
        void* param_value, std::size_t* param_value_size_ret),                                      \
       (kernel, param_name, param_value_size, param_value, param_value_size_ret))                   \
  CODE(clGetKernelArgInfo,                                                                          \
       (cl_kernel kernel, cl_uint arg_indx, cl_kernel_arg_info param_name,                          \
        std::size_t param_value_size, void* param_value, std::size_t* param_value_size_ret),        \
       (kernel, arg_indx, param_name, param_value_size, param_value, param_value_size_ret))         \
  CODE(clGetKernelWorkGroupInfo,                                                                    \
       (cl_kernel kernel, cl_device_id device, cl_kernel_work_group_info param_name,                \
        std::size_t param_value_size, void* param_value, std::size_t* param_value_size_ret),        \
       (kernel, device, param_name, param_value_size, param_value, param_value_size_ret))           \
  /* events */                                                                                      \
  CODE(clWaitForEvents, (cl_uint num_events, const cl_event* event_list), (num_events, event_list)) \
  CODE(clGetEventInfo,                                                                              \
       (cl_event event, cl_event_info param_name, std::size_t param_value_size, void* param_value,  \
        std::size_t* param_value_size_ret),                                                         \
       (event, param_name, param_value_size, param_value, param_value_size_ret))                    \
  ERR(cl_event, clCreateUserEvent, (cl_context context, cl_int * errcode_ret),                      \
      (context, errcode_ret))                                                                       \
  CODE(clRetainEvent, (cl_event event), (event))                                                    \
  CODE(clReleaseEvent, (cl_event event), (event))                                                   \
  CODE(clSetUserEventStatus, (cl_event event, cl_int execution_status), (event, execution_status))  \
  CODE(clSetEventCallback,                                                                          \
       (cl_event event, cl_int command_exec_callback_type, event_notify_fn pfn_notify,              \
        void* user_data),                                                                           \
       (event, command_exec_callback_type, pfn_notify, user_data))                                  \
  CODE(clGetEventProfilingInfo,                                                                     \
       (cl_event event, cl_profiling_info param_name, std::size_t param_value_size,                 \
        void* param_value, std::size_t* param_value_size_ret),                                      \
       (event, param_name, param_value_size, param_value, param_value_size_ret))                    \
  /* flush and finish */                                                                            \
  CODE(clFlush, (cl_command_queue command_queue), (command_queue))                                  \
  CODE(clFinish, (cl_command_queue command_queue), (command_queue))                                 \
  /* enqueued commands */                                                                           \
  CODE(clEnqueueReadBuffer,                                                                         \
       (cl_command_queue command_queue, cl_mem buffer, cl_bool blocking_read, std::size_t offset,   \
        std::size_t size, void* ptr, cl_uint num_events_in_wait_list,                               \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, buffer, blocking_read, offset, size, ptr, num_events_in_wait_list,           \
        event_wait_list, event))                                                                    \
  CODE(clEnqueueReadBufferRect,                                                                     \
       (cl_command_queue command_queue, cl_mem buffer, cl_bool blocking_read,                       \
        const std::size_t* buffer_offset, const std::size_t* host_offset,                           \
        const std::size_t* region, std::size_t buffer_row_pitch, std::size_t buffer_slice_pitch,    \
        std::size_t host_row_pitch, std::size_t host_slice_pitch, void* ptr,                        \
        cl_uint num_events_in_wait_list, const cl_event* event_wait_list, cl_event* event),         \
       (command_queue, buffer, blocking_read, buffer_offset, host_offset, region,                   \
        buffer_row_pitch, buffer_slice_pitch, host_row_pitch, host_slice_pitch, ptr,                \
        num_events_in_wait_list, event_wait_list, event))                                           \
  CODE(clEnqueueWriteBuffer,                                                                        \
       (cl_command_queue command_queue, cl_mem buffer, cl_bool blocking_write, std::size_t offset,  \
        std::size_t size, const void* ptr, cl_uint num_events_in_wait_list,                         \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, buffer, blocking_write, offset, size, ptr, num_events_in_wait_list,          \
        event_wait_list, event))                                                                    \
  CODE(clEnqueueWriteBufferRect,                                                                    \
       (cl_command_queue command_queue, cl_mem buffer, cl_bool blocking_write,                      \
        const std::size_t* buffer_offset, const std::size_t* host_offset,                           \
        const std::size_t* region, std::size_t buffer_row_pitch, std::size_t buffer_slice_pitch,    \
        std::size_t host_row_pitch, std::size_t host_slice_pitch, const void* ptr,                  \
        cl_uint num_events_in_wait_list, const cl_event* event_wait_list, cl_event* event),         \
       (command_queue, buffer, blocking_write, buffer_offset, host_offset, region,                  \
        buffer_row_pitch, buffer_slice_pitch, host_row_pitch, host_slice_pitch, ptr,                \
        num_events_in_wait_list, event_wait_list, event))                                           \
  CODE(clEnqueueFillBuffer,                                                                         \
       (cl_command_queue command_queue, cl_mem buffer, const void* pattern,                         \
        std::size_t pattern_size, std::size_t offset, std::size_t size,                             \
        cl_uint num_events_in_wait_list, const cl_event* event_wait_list, cl_event* event),         \
       (command_queue, buffer, pattern, pattern_size, offset, size, num_events_in_wait_list,        \
        event_wait_list, event))                                                                    \
  CODE(clEnqueueCopyBuffer,                                                                         \
       (cl_command_queue command_queue, cl_mem src_buffer, cl_mem dst_buffer,                       \
        std::size_t src_offset, std::size_t dst_offset, std::size_t size,                           \
        cl_uint num_events_in_wait_list, const cl_event* event_wait_list, cl_event* event),         \
       (command_queue, src_buffer, dst_buffer, src_offset, dst_offset, size,                        \
        num_events_in_wait_list, event_wait_list, event))                                           \
  CODE(clEnqueueCopyBufferRect,                                                                     \
       (cl_command_queue command_queue, cl_mem src_buffer, cl_mem dst_buffer,                       \
        const std::size_t* src_origin, const std::size_t* dst_origin, const std::size_t* region,    \
        std::size_t src_row_pitch, std::size_t src_slice_pitch, std::size_t dst_row_pitch,          \
        std::size_t dst_slice_pitch, cl_uint num_events_in_wait_list,                               \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, src_buffer, dst_buffer, src_origin, dst_origin, region, src_row_pitch,       \
        src_slice_pitch, dst_row_pitch, dst_slice_pitch, num_events_in_wait_list,                   \
        event_wait_list, event))                                                                    \
  CODE(clEnqueueReadImage,                                                                          \
       (cl_command_queue command_queue, cl_mem image, cl_bool blocking_read,                        \
        const std::size_t* origin, const std::size_t* region, std::size_t row_pitch,                \
        std::size_t slice_pitch, void* ptr, cl_uint num_events_in_wait_list,                        \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, image, blocking_read, origin, region, row_pitch, slice_pitch, ptr,           \
        num_events_in_wait_list, event_wait_list, event))                                           \
  CODE(clEnqueueWriteImage,                                                                         \
       (cl_command_queue command_queue, cl_mem image, cl_bool blocking_write,                       \
        const std::size_t* origin, const std::size_t* region, std::size_t input_row_pitch,          \
        std::size_t input_slice_pitch, const void* ptr, cl_uint num_events_in_wait_list,            \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, image, blocking_write, origin, region, input_row_pitch, input_slice_pitch,   \
        ptr, num_events_in_wait_list, event_wait_list, event))                                      \
  CODE(clEnqueueFillImage,                                                                          \
       (cl_command_queue command_queue, cl_mem image, const void* fill_color,                       \
        const std::size_t* origin, const std::size_t* region, cl_uint num_events_in_wait_list,      \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, image, fill_color, origin, region, num_events_in_wait_list,                  \
        event_wait_list, event))                                                                    \
  CODE(clEnqueueCopyImage,                                                                          \
       (cl_command_queue command_queue, cl_mem src_image, cl_mem dst_image,                         \
        const std::size_t* src_origin, const std::size_t* dst_origin, const std::size_t* region,    \
        cl_uint num_events_in_wait_list, const cl_event* event_wait_list, cl_event* event),         \
       (command_queue, src_image, dst_image, src_origin, dst_origin, region,                        \
        num_events_in_wait_list, event_wait_list, event))                                           \
  CODE(clEnqueueCopyImageToBuffer,                                                                  \
       (cl_command_queue command_queue, cl_mem src_image, cl_mem dst_buffer,                        \
        const std::size_t* src_origin, const std::size_t* region, std::size_t dst_offset,           \
        cl_uint num_events_in_wait_list, const cl_event* event_wait_list, cl_event* event),         \
       (command_queue, src_image, dst_buffer, src_origin, region, dst_offset,                       \
        num_events_in_wait_list, event_wait_list, event))                                           \
  CODE(clEnqueueCopyBufferToImage,                                                                  \
       (cl_command_queue command_queue, cl_mem src_buffer, cl_mem dst_image,                        \
        std::size_t src_offset, const std::size_t* dst_origin, const std::size_t* region,          \
        cl_uint num_events_in_wait_list, const cl_event* event_wait_list, cl_event* event),         \
       (command_queue, src_buffer, dst_image, src_offset, dst_origin, region,                       \
        num_events_in_wait_list, event_wait_list, event))                                           \
  ERR(void*, clEnqueueMapBuffer,                                                                    \
      (cl_command_queue command_queue, cl_mem buffer, cl_bool blocking_map, cl_map_flags map_flags, \
       std::size_t offset, std::size_t size, cl_uint num_events_in_wait_list,                       \
       const cl_event* event_wait_list, cl_event* event, cl_int* errcode_ret),                      \
      (command_queue, buffer, blocking_map, map_flags, offset, size, num_events_in_wait_list,       \
       event_wait_list, event, errcode_ret))                                                        \
  ERR(void*, clEnqueueMapImage,                                                                     \
      (cl_command_queue command_queue, cl_mem image, cl_bool blocking_map, cl_map_flags map_flags,  \
       const std::size_t* origin, const std::size_t* region, std::size_t* image_row_pitch,          \
       std::size_t* image_slice_pitch, cl_uint num_events_in_wait_list,                             \
       const cl_event* event_wait_list, cl_event* event, cl_int* errcode_ret),                      \
      (command_queue, image, blocking_map, map_flags, origin, region, image_row_pitch,              \
       image_slice_pitch, num_events_in_wait_list, event_wait_list, event, errcode_ret))            \
  CODE(clEnqueueUnmapMemObject,                                                                     \
       (cl_command_queue command_queue, cl_mem memobj, void* mapped_ptr,                            \
        cl_uint num_events_in_wait_list, const cl_event* event_wait_list, cl_event* event),         \
       (command_queue, memobj, mapped_ptr, num_events_in_wait_list, event_wait_list, event))        \
  CODE(clEnqueueMigrateMemObjects,                                                                  \
       (cl_command_queue command_queue, cl_uint num_mem_objects, const cl_mem* mem_objects,         \
        cl_mem_migration_flags flags, cl_uint num_events_in_wait_list,                              \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, num_mem_objects, mem_objects, flags, num_events_in_wait_list,                \
        event_wait_list, event))                                                                    \
  CODE(clEnqueueNDRangeKernel,                                                                      \
       (cl_command_queue command_queue, cl_kernel kernel, cl_uint work_dim,                         \
        const std::size_t* global_work_offset, const std::size_t* global_work_size,                 \
        const std::size_t* local_work_size, cl_uint num_events_in_wait_list,                        \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, kernel, work_dim, global_work_offset, global_work_size, local_work_size,     \
        num_events_in_wait_list, event_wait_list, event))                                           \
  CODE(clEnqueueTask,                                                                               \
       (cl_command_queue command_queue, cl_kernel kernel, cl_uint num_events_in_wait_list,          \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, kernel, num_events_in_wait_list, event_wait_list, event))                    \
  CODE(clEnqueueNativeKernel,                                                                       \
       (cl_command_queue command_queue, native_kernel_fn user_func, void* args,                     \
        std::size_t cb_args, cl_uint num_mem_objects, const cl_mem* mem_list,                       \
        const void** args_mem_loc, cl_uint num_events_in_wait_list,                                 \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, user_func, args, cb_args, num_mem_objects, mem_list, args_mem_loc,           \
        num_events_in_wait_list, event_wait_list, event))                                           \
  CODE(clEnqueueMarkerWithWaitList,                                                                 \
       (cl_command_queue command_queue, cl_uint num_events_in_wait_list,                            \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, num_events_in_wait_list, event_wait_list, event))                            \
  CODE(clEnqueueBarrierWithWaitList,                                                                \
       (cl_command_queue command_queue, cl_uint num_events_in_wait_list,                            \
        const cl_event* event_wait_list, cl_event* event),                                          \
       (command_queue, num_events_in_wait_list, event_wait_list, event))                            \
  PTR(clGetExtensionFunctionAddressForPlatform, (cl_platform_id platform, const char* func_name),   \
      (platform, func_name))                                                                        \
  /* deprecated in 1.2, still part of the 1.2 ABI */                                                \
  ERR(cl_mem, clCreateImage2D,                                                                      \
      (cl_context context, cl_mem_flags flags, const cl_image_format* image_format,                 \
       std::size_t image_width, std::size_t image_height, std::size_t image_row_pitch,              \
       void* host_ptr, cl_int* errcode_ret),                                                        \
      (context, flags, image_format, image_width, image_height, image_row_pitch, host_ptr,          \
       errcode_ret))                                                                                \
  ERR(cl_mem, clCreateImage3D,                                                                      \
      (cl_context context, cl_mem_flags flags, const cl_image_format* image_format,                 \
       std::size_t image_width, std::size_t image_height, std::size_t image_depth,                  \
       std::size_t image_row_pitch, std::size_t image_slice_pitch, void* host_ptr,                  \
       cl_int* errcode_ret),                                                                        \
      (context, flags, image_format, image_width, image_height, image_depth, image_row_pitch,       \
       image_slice_pitch, host_ptr, errcode_ret))                                                   \
  CODE(clEnqueueMarker, (cl_command_queue command_queue, cl_event * event), (command_queue, event)) \
  CODE(clEnqueueWaitForEvents,                                                                      \
       (cl_command_queue command_queue, cl_uint num_events, const cl_event* event_list),            \
       (command_queue, num_events, event_list))                                                     \
  CODE(clEnqueueBarrier, (cl_command_queue command_queue), (command_queue))                         \
  CODE(clUnloadCompiler, (), ())                                                                    \
  PTR(clGetExtensionFunctionAddress, (const char* func_name), (func_name))
