#include <stdio.h>
#include <string.h>
#include "cantor.h"

int main(void) {
    CantorMap *fold = NULL;
    CantorClopen *set = NULL, *pre = NULL;
    char *json = NULL;
    if (cantor_map_from_json("fold", &fold) != CANTOR_STATUS_OK) return 1;
    if (cantor_clopen_from_json("[\"0\"]", &set) != CANTOR_STATUS_OK) return 2;
    if (cantor_map_preimage(fold, set, &pre) != CANTOR_STATUS_OK) return 3;
    if (cantor_clopen_to_json(pre, &json) != CANTOR_STATUS_OK) return 4;
    int same = strcmp(json, "{\"antichain\":[\"00\",\"11\"]}") == 0;
    printf("%s\n", json);
    cantor_string_free(json);
    if (cantor_clopen_from_json("nope", &set) != CANTOR_STATUS_PARSE || cantor_last_error() == NULL) return 5;
    cantor_clopen_free(set);
    cantor_clopen_free(pre);
    cantor_map_free(fold);
    return same ? 0 : 6;
}
