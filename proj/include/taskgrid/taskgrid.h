#ifndef TASKGRID_TASKGRID_H
#define TASKGRID_TASKGRID_H

#include <stdint.h>

#if defined(_WIN32)
#define TG_API __declspec(dllexport)
#else
#define TG_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tg_status {
    TG_OK = 0,
    TG_ERR_ARGUMENT = 1,   /* null pointer, unparseable text */
    TG_ERR_IO = 2,         /* file could not be read or written */
    TG_ERR_FORMAT = 3,     /* malformed scene, dataset, checkpoint or JSON */
    TG_ERR_CONFIG = 4,     /* invalid configuration */
    TG_ERR_COMPLETER = 5,  /* backend or response parse failure */
    TG_ERR_RUNTIME = 6     /* anything else */
} tg_status;

/* Opaque handles. */
typedef struct tg_scene tg_scene;
typedef struct tg_localizer tg_localizer;

TG_API const char* tg_version(void);
/* Message for the last failed call on this thread; never null. */
TG_API const char* tg_last_error(void);
/* Strings returned through char** out-parameters are released with this. */
TG_API void tg_string_free(char* s);

/* Scenes. room is "Kitchen", "Bathroom", ...; JSON is one scene record. */
TG_API tg_status tg_scene_generate(uint64_t seed, const char* room, int hard, tg_scene** out);
TG_API tg_status tg_scene_from_json(const char* json, tg_scene** out);
TG_API tg_status tg_scene_to_json(const tg_scene* scene, char** out);
TG_API tg_status tg_scene_expert_length(const tg_scene* scene, int* out);
TG_API void tg_scene_free(tg_scene* scene);

/* Writes one scene per line for every episode the eval config describes. */
TG_API tg_status tg_generate_scenes(const char* eval_config_json, const char* out_path, int* count);

/* Expert-replay dataset from a scene JSONL file. */
TG_API tg_status tg_collect_dataset(const char* scenes_path, int survey_budget, const char* out_path, int* records);

/* Localizer. config_json may be null for defaults. */
TG_API tg_status tg_localizer_create(const char* config_json, tg_localizer** out);
TG_API tg_status tg_localizer_load(const char* path, tg_localizer** out);
TG_API tg_status tg_localizer_save(const tg_localizer* model, const char* path);
/* Trains on a dataset JSONL; writes "epoch,loss" CSV to log_path when not
   null. summary receives JSON with held-out and baseline hit rates. */
TG_API tg_status tg_localizer_train(tg_localizer* model, const char* dataset_path, const char* train_config_json,
                                    const char* log_path, char** summary);
TG_API void tg_localizer_free(tg_localizer* model);

/* Runs an evaluation; relative paths in the config resolve against base_dir.
   results receives the full results document. */
TG_API tg_status tg_run_eval(const char* eval_config_json, const char* base_dir, char** results);
/* Markdown tables from a results document. */
TG_API tg_status tg_report(const char* results_json, char** markdown);
/* One completer round trip for a subgoal such as "Pickup Mug". */
TG_API tg_status tg_complete(const tg_scene* scene, const char* subgoal, const char* backend, char** out);

#ifdef __cplusplus
}
#endif

#endif
