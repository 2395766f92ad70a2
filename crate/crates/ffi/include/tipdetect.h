#ifndef TIPDETECT_H
#define TIPDETECT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result code of every fallible call.
 */
typedef enum TdStatus {
  TD_STATUS_OK = 0,
  TD_STATUS_NULL_POINTER = 1,
  TD_STATUS_INVALID_UTF8 = 2,
  TD_STATUS_INVALID_CONFIG = 3,
  TD_STATUS_INVALID_DIMENSIONS = 4,
  TD_STATUS_OUT_OF_RANGE = 5,
  TD_STATUS_NOT_AVAILABLE = 6,
  TD_STATUS_PANIC = 7,
} TdStatus;

typedef enum TdFrameStatus {
  TD_FRAME_STATUS_OK = 0,
  TD_FRAME_STATUS_NO_HAND = 1,
} TdFrameStatus;

/*
 Edge of the frame a hand enters from or points to.
 */
typedef enum TdSide {
  TD_SIDE_NONE = 0,
  TD_SIDE_UP = 1,
  TD_SIDE_DOWN = 2,
  TD_SIDE_LEFT = 3,
  TD_SIDE_RIGHT = 4,
} TdSide;

typedef struct TdConfig TdConfig;

typedef struct TdPipeline TdPipeline;

typedef struct TdRecord TdRecord;

/*
 A pixel position: `x` is the row, `y` the column, both 0-based.
 */
typedef struct TdPoint {
  size_t x;
  size_t y;
} TdPoint;

/*
 Inclusive crop bounds in frame coordinates.
 */
typedef struct TdCropBox {
  size_t x_min;
  size_t x_max;
  size_t y_min;
  size_t y_max;
} TdCropBox;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Library version as a static NUL-terminated string.
 */
const char *td_version(void);

/*
 Static description of a status code.
 */
const char *td_status_message(enum TdStatus status);

/*
 Message for the most recent failure on this thread, or an empty string.
 Valid until the next `td_*` call on the same thread.
 */
const char *td_last_error(void);

/*
 New configuration holding the default settings. Never null.
 */
struct TdConfig *td_config_new(void);

/*
 # Safety
 `cfg` must be null or a handle from `td_config_new` not yet freed.
 */
void td_config_free(struct TdConfig *cfg);

/*
 Sets one option by its configuration-file key, e.g. `"hue_max"`, `"30"`.

 # Safety
 `cfg` must be a live handle; `key` and `value` NUL-terminated strings.
 */
enum TdStatus td_config_set(struct TdConfig *cfg, const char *key, const char *value);

/*
 Validates `cfg` and builds a pipeline from a copy of it.

 # Safety
 `cfg` must be a live handle and `out` a writable pointer.
 */
enum TdStatus td_pipeline_new(const struct TdConfig *cfg, struct TdPipeline **out);

/*
 # Safety
 `p` must be null or a handle from `td_pipeline_new` not yet freed.
 */
void td_pipeline_free(struct TdPipeline *p);

/*
 Runs the pipeline on a packed RGB8 frame of `len` bytes, row-major,
 `width * height * 3` long. `frame_id` may be null.

 # Safety
 `p` must be a live handle, `data` readable for `len` bytes, `out` writable.
 */
enum TdStatus td_pipeline_process_rgb(const struct TdPipeline *p,
                                      const char *frame_id,
                                      const uint8_t *data,
                                      size_t len,
                                      size_t width,
                                      size_t height,
                                      struct TdRecord **out);

/*
 # Safety
 `rec` must be null or a record handle not yet freed.
 */
void td_record_free(struct TdRecord *rec);

/*
 # Safety
 `rec` must be a live record handle and `out` writable.
 */
enum TdStatus td_record_status(const struct TdRecord *rec, enum TdFrameStatus *out);

/*
 `TD_SIDE_NONE` for a null record or a frame without a hand.

 # Safety
 `rec` must be null or a live record handle.
 */
enum TdSide td_record_wrist_side(const struct TdRecord *rec);

/*
 # Safety
 `rec` must be null or a live record handle.
 */
enum TdSide td_record_finger_side(const struct TdRecord *rec);

/*
 Number of fingertips; 0 for a null record.

 # Safety
 `rec` must be null or a live record handle.
 */
size_t td_record_fingertip_count(const struct TdRecord *rec);

/*
 # Safety
 `rec` must be a live record handle and `out` writable.
 */
enum TdStatus td_record_fingertip(const struct TdRecord *rec, size_t index, struct TdPoint *out);

/*
 `TD_STATUS_NOT_AVAILABLE` when the frame has no hand or cropping is off.

 # Safety
 `rec` must be a live record handle and `out` writable.
 */
enum TdStatus td_record_crop(const struct TdRecord *rec, struct TdCropBox *out);

/*
 Serialises the record as one JSON object without a trailing newline.
 Release the string with `td_string_free`.

 # Safety
 `rec` must be a live record handle and `out` writable.
 */
enum TdStatus td_record_to_json(const struct TdRecord *rec, int include_timings, char **out);

/*
 # Safety
 `s` must be null or a string returned by this library, not yet freed.
 */
void td_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TIPDETECT_H */
